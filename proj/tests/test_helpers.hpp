#pragma once

#include <random>
#include <vector>

#include "bhmf/matrix.hpp"
#include "bhmf/spectrum.hpp"

namespace bhmf_test {

inline bhmf::Matrix random_symmetric(int n, std::mt19937& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    bhmf::Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double v = dist(rng);
            a(i, j) = v;
            a(j, i) = v;
        }
    return a;
}

// Random full-rank density matrix: random orthogonal basis (from a random
// symmetric eigendecomposition) with normalized positive weights.
inline bhmf::Matrix random_density(int n, std::mt19937& rng) {
    const bhmf::SpectralDecomposition basis = bhmf::eig_symmetric(random_symmetric(n, rng));
    std::uniform_real_distribution<double> dist(0.05, 1.0);
    std::vector<double> w(n);
    double sum = 0.0;
    for (double& v : w) {
        v = dist(rng);
        sum += v;
    }
    bhmf::Matrix rho(n, n);
    for (int k = 0; k < n; ++k) {
        const double p = w[k] / sum;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                rho(i, j) += p * basis.eigenvectors(i, k) * basis.eigenvectors(j, k);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = 0.5 * (rho(i, j) + rho(j, i));
            rho(i, j) = v;
            rho(j, i) = v;
        }
    return rho;
}

}  // namespace bhmf_test
