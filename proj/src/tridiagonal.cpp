#include "mqc/tridiagonal.hpp"

#include <stdexcept>
#include <string>

#include <lapacke.h>

namespace mqc {

namespace {

TridiagonalEigen run_stevr(const std::vector<double>& diagonal, const std::vector<double>& off_diagonal,
                           char range, int il, int iu, bool want_vectors) {
    const auto n = static_cast<lapack_int>(diagonal.size());
    if (n == 0) throw std::invalid_argument("tridiagonal eigensolver: empty matrix");
    if (off_diagonal.size() + 1 != diagonal.size()) {
        throw std::invalid_argument("tridiagonal eigensolver: off-diagonal must have n-1 entries");
    }
    std::vector<double> d = diagonal;
    // dstevr reads n entries of e (the last is workspace).
    std::vector<double> e(off_diagonal);
    e.push_back(0.0);

    const lapack_int count = range == 'A' ? n : iu - il + 1;
    lapack_int found = 0;
    std::vector<double> w(static_cast<std::size_t>(n));
    std::vector<lapack_int> isuppz(static_cast<std::size_t>(2 * std::max<lapack_int>(count, 1)));
    TridiagonalEigen out;
    if (want_vectors) out.vectors.resize(n, count);
    const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', range, n, d.data(), e.data(),
                                           0.0, 0.0, il, iu, 0.0, &found, w.data(),
                                           want_vectors ? out.vectors.data() : nullptr, n, isuppz.data());
    if (info != 0 || found != count) {
        throw std::runtime_error("LAPACK dstevr failed (info " + std::to_string(info) + ")");
    }
    out.values = Eigen::Map<Eigen::VectorXd>(w.data(), count);
    return out;
}

}  // namespace

TridiagonalEigen tridiagonal_lowest(const std::vector<double>& diagonal, const std::vector<double>& off_diagonal,
                                    int count, bool want_vectors) {
    const int n = static_cast<int>(diagonal.size());
    if (count < 1 || count > n) throw std::invalid_argument("tridiagonal_lowest: count out of range");
    return run_stevr(diagonal, off_diagonal, 'I', 1, count, want_vectors);
}

TridiagonalEigen tridiagonal_all(const std::vector<double>& diagonal, const std::vector<double>& off_diagonal) {
    return run_stevr(diagonal, off_diagonal, 'A', 0, 0, true);
}

}  // namespace mqc
