// Four series, the first two sharing a period-64 cycle. Prints the mean
// multiple coherence of X1 on the rest per scale band, inside the COI.

#include <wcoh/coherence.hpp>
#include <wcoh/cwt.hpp>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <vector>

int main()
{
    const std::size_t n = 1024;
    std::mt19937_64 rng(11);
    std::normal_distribution<double> noise(0.0, 1.0);

    std::vector<std::vector<double>> x(4, std::vector<double>(n));
    for (std::size_t t = 0; t < n; ++t) {
        const double s = std::sqrt(2.0) * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / 64.0);
        x[0][t] = s + noise(rng);
        x[1][t] = s + noise(rng);
        x[2][t] = noise(rng);
        x[3][t] = noise(rng);
    }

    const auto grid = wcoh::make_scale_grid(n, 1.0);
    std::vector<wcoh::WaveletField> fields;
    for (const auto& col : x) fields.push_back(wcoh::cwt_morlet(col, 1.0, grid));
    const auto cf = wcoh::coherence_matrix_field(fields, wcoh::Smoother(grid, 1.0));
    const auto mwc = wcoh::multiple_coherence(cf, 0);
    const auto biv = wcoh::bivariate_coherence(cf, 0, 1);

    std::printf("%10s %10s %12s %12s\n", "scale", "period", "R2_1(234)", "|rho12|^2");
    for (std::size_t j = 0; j < grid.num_scales; j += 6) {
        double sm = 0.0, sb = 0.0;
        std::size_t count = 0;
        for (std::size_t t = 0; t < n; ++t)
            if (mwc.usable(j, t)) {
                sm += mwc(j, t);
                sb += biv(j, t);
                ++count;
            }
        if (count == 0) continue;
        std::printf("%10.2f %10.2f %12.3f %12.3f\n", grid.scales[j], grid.scales[j] * grid.fourier_factor,
                    sm / static_cast<double>(count), sb / static_cast<double>(count));
    }
}
