#include "intertwine/stencil.hpp"

#include <array>

namespace itw {

std::vector<double> fornberg_weights(double z, const std::vector<double>& nodes, int m) {
    const int nd = static_cast<int>(nodes.size()) - 1;
    std::vector<std::vector<double>> c(nodes.size(), std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i <= nd; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) w[i] = c[i][m];
    return w;
}

namespace {

// Central minimal stencils of formal order 4, as multiples of 1/h^order.
// d1: 5 points, d2: 5 points, d3: 7 points, d4: 7 points.
struct Central {
    int half;
    std::array<double, 7> w;
};

const Central& central_stencil(int order) {
    static const Central tabs[4] = {
        {2, {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12, 0, 0}},
        {2, {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12, 0, 0}},
        {3, {1.0 / 8, -1.0, 13.0 / 8, 0.0, -13.0 / 8, 1.0, -1.0 / 8}},
        {3, {-1.0 / 6, 2.0, -13.0 / 2, 28.0 / 3, -13.0 / 2, 2.0, -1.0 / 6}},
    };
    return tabs[order - 1];
}

// One-sided weights for the 4 points nearest a boundary: (order + 4) nodes
// anchored at the boundary keep the formal order at 4.
struct EdgeWeights {
    int width;
    std::array<std::vector<double>, 4> rows; // rows[p] = weights at offset p from edge
};

EdgeWeights make_edge_weights(int order) {
    EdgeWeights ew;
    ew.width = order + 4;
    std::vector<double> nodes(ew.width);
    for (int i = 0; i < ew.width; ++i) nodes[i] = static_cast<double>(i);
    for (int p = 0; p < 4; ++p)
        ew.rows[p] = fornberg_weights(static_cast<double>(p), nodes, order);
    return ew;
}

const EdgeWeights& edge_weights(int order) {
    static const EdgeWeights tabs[4] = {
        make_edge_weights(1), make_edge_weights(2), make_edge_weights(3), make_edge_weights(4)};
    return tabs[order - 1];
}

template <typename T>
void apply_stencils(const std::vector<T>& y, std::vector<T>& out, double h, int order) {
    const int n = static_cast<int>(y.size());
    const Central& c = central_stencil(order);
    const EdgeWeights& e = edge_weights(order);
    require(n >= 9 && n >= e.width, "too-few-points",
            "grid too small for the requested derivative stencil");
    double hp = 1.0;
    for (int k = 0; k < order; ++k) hp *= h;

    // central stencil on 4..n-5, one-sided rows on the 4 points at each edge
    for (int i = 4; i < n - 4; ++i) {
        T acc{};
        for (int j = -c.half; j <= c.half; ++j) acc += c.w[j + c.half] * y[i + j];
        out[i] = acc / hp;
    }
    for (int p = 0; p < 4; ++p) {
        T acc{};
        for (int j = 0; j < e.width; ++j) acc += e.rows[p][j] * y[j];
        out[p] = acc / hp;
        // mirrored window: nodes run backwards from the right edge, so odd
        // derivative orders flip sign.
        T acc2{};
        for (int j = 0; j < e.width; ++j) acc2 += e.rows[p][j] * y[n - 1 - j];
        out[n - 1 - p] = (order % 2 == 0 ? acc2 : -acc2) / hp;
    }
}

} // namespace

ComplexField differentiate(const ComplexField& f, int order) {
    require(order >= 1 && order <= 4, "unsupported-order",
            "derivative order must be between 1 and 4, got " + std::to_string(order));
    ComplexField r(f.grid);
    apply_stencils(f.values, r.values, f.grid.h, order);
    r.unreliable_band = std::max(f.unreliable_band + 4, 4);
    return r;
}

std::vector<double> differentiate_samples(const std::vector<double>& y, double h, int order) {
    require(order >= 1 && order <= 4, "unsupported-order",
            "derivative order must be between 1 and 4, got " + std::to_string(order));
    std::vector<double> out(y.size(), 0.0);
    apply_stencils(y, out, h, order);
    return out;
}

} // namespace itw
