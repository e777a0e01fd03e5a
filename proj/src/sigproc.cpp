#include "frfpce/sigproc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "frfpce/errors.hpp"

namespace frfpce::sigproc {

namespace {

void require_strictly_increasing(const Eigen::VectorXd& v, const char* what) {
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (!(v(i) > v(i - 1)))
            throw NumericError(std::string(what) + ": knots not strictly increasing");
}

/// Vertex of the parabola through (x0,y0),(x1,y1),(x2,y2); falls back to x1
/// when the fit is degenerate or the vertex escapes [x0, x2].
double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
    const double d01 = x1 - x0, d12 = x1 - x2;
    const double num = d01 * d01 * (y1 - y2) - d12 * d12 * (y1 - y0);
    const double den = d01 * (y1 - y2) - d12 * (y1 - y0);
    if (std::abs(den) < 1e-300) return x1;
    const double x = x1 - 0.5 * num / den;
    if (!(x >= x0 && x <= x2)) return x1;
    return x;
}

/// Natural cubic spline through strictly increasing abscissae. Piecewise
/// linear interpolation is not accurate enough here: resonance peaks a few
/// grid steps wide lose percents of amplitude per resample pass, which
/// dominates the warp round-trip error.
class CubicSpline {
public:
    CubicSpline(const Eigen::VectorXd& x, const Eigen::VectorXd& y) : x_(x), y_(y) {
        const Eigen::Index n = x.size();
        // tridiagonal system for the second derivatives, natural ends
        Eigen::VectorXd sub = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd diag = Eigen::VectorXd::Ones(n);
        Eigen::VectorXd sup = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
        for (Eigen::Index i = 1; i + 1 < n; ++i) {
            const double h0 = x(i) - x(i - 1);
            const double h1 = x(i + 1) - x(i);
            sub(i) = h0 / 6.0;
            diag(i) = (h0 + h1) / 3.0;
            sup(i) = h1 / 6.0;
            rhs(i) = (y(i + 1) - y(i)) / h1 - (y(i) - y(i - 1)) / h0;
        }
        for (Eigen::Index i = 1; i < n; ++i) {
            const double w = sub(i) / diag(i - 1);
            diag(i) -= w * sup(i - 1);
            rhs(i) -= w * rhs(i - 1);
        }
        curv_.resize(n);
        curv_(n - 1) = rhs(n - 1) / diag(n - 1);
        for (Eigen::Index i = n - 2; i >= 0; --i)
            curv_(i) = (rhs(i) - sup(i) * curv_(i + 1)) / diag(i);
    }

    /// Clamps beyond the span, exact at the nodes.
    double operator()(double q) const {
        const Eigen::Index n = x_.size();
        if (q <= x_(0)) return y_(0);
        if (q >= x_(n - 1)) return y_(n - 1);
        Eigen::Index lo = 0, hi = n - 1;
        while (hi - lo > 1) {
            const Eigen::Index mid = (lo + hi) / 2;
            (x_(mid) <= q ? lo : hi) = mid;
        }
        const double h = x_(hi) - x_(lo);
        const double a = (x_(hi) - q) / h;
        const double b = (q - x_(lo)) / h;
        return a * y_(lo) + b * y_(hi) +
               ((a * a * a - a) * curv_(lo) + (b * b * b - b) * curv_(hi)) * h * h / 6.0;
    }

private:
    Eigen::VectorXd x_, y_, curv_;
};

}  // namespace

PiecewiseLinearMap::PiecewiseLinearMap(Eigen::VectorXd source_knots, Eigen::VectorXd target_knots)
    : source_(std::move(source_knots)), target_(std::move(target_knots)) {
    if (source_.size() != target_.size())
        throw NumericError("piecewise map: knot lists differ in length");
    if (source_.size() < 2) throw NumericError("piecewise map: needs at least 2 knots");
    require_strictly_increasing(source_, "piecewise map (source)");
    require_strictly_increasing(target_, "piecewise map (target)");
}

double PiecewiseLinearMap::operator()(double w) const {
    const Eigen::Index n = source_.size();
    if (w == source_(0)) return target_(0);
    if (w == source_(n - 1)) return target_(n - 1);
    Eigen::Index lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        const Eigen::Index mid = (lo + hi) / 2;
        if (source_(mid) <= w)
            lo = mid;
        else
            hi = mid;
    }
    // segment slope/intercept chosen so both segment endpoints map exactly
    const double a = (target_(lo) - target_(hi)) / (source_(lo) - source_(hi));
    const double b = target_(hi) - a * source_(hi);
    return a * w + b;
}

Eigen::VectorXd PiecewiseLinearMap::apply(const Eigen::VectorXd& w) const {
    Eigen::VectorXd out(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) out(i) = (*this)(w(i));
    return out;
}

SelectedFrequencies extract_selected_frequencies(
    const dynsys::FrfSet& frf, const std::vector<std::complex<double>>& poles) {
    const Eigen::VectorXd& w = frf.grid.values();
    const Eigen::Index nw = w.size();
    const Eigen::Index nch = frf.n_channels();

    // resonances: |Im| of the upper-half-plane poles inside the open span
    std::vector<double> peaks;
    for (const auto& p : poles) {
        if (p.imag() <= 0.0) continue;  // conjugate partner carries the same |Im|
        const double wp = p.imag();
        if (wp > w(0) && wp < w(nw - 1)) peaks.push_back(wp);
    }
    std::sort(peaks.begin(), peaks.end());
    if (peaks.empty())
        throw NumericError("selected frequencies: no resonance inside the grid span");
    const int np = static_cast<int>(peaks.size());
    const Eigen::Index nsf = 2 * np + 1;

    SelectedFrequencies sel;
    sel.n_peaks = np;
    sel.rows.resize(nch, nsf);

    for (Eigen::Index c = 0; c < nch; ++c) {
        sel.rows(c, 0) = w(0);
        sel.rows(c, nsf - 1) = w(nw - 1);
        for (int i = 0; i < np; ++i) sel.rows(c, 2 * i + 1) = peaks[static_cast<std::size_t>(i)];

        for (int i = 0; i + 1 < np; ++i) {
            const double lo = peaks[static_cast<std::size_t>(i)];
            const double hi = peaks[static_cast<std::size_t>(i) + 1];
            // grid points strictly between the two resonances
            Eigen::Index first = 0;
            while (first < nw && w(first) <= lo) ++first;
            Eigen::Index last = first;
            while (last < nw && w(last) < hi) ++last;  // one past
            if (last - first < 3)
                throw NumericError(
                    "selected frequencies: valley interval holds fewer than 3 grid points "
                    "(refine the grid)");
            Eigen::Index arg = first;
            double best = std::abs(frf.channels(c, first));
            for (Eigen::Index l = first + 1; l < last; ++l) {
                const double mag = std::abs(frf.channels(c, l));
                if (mag < best) {
                    best = mag;
                    arg = l;
                }
            }
            // quadratic refinement of log|H| through the argmin's neighbours
            const Eigen::Index l0 = std::max<Eigen::Index>(arg - 1, 0);
            const Eigen::Index l2 = std::min<Eigen::Index>(arg + 1, nw - 1);
            double valley = w(arg);
            if (l0 < arg && arg < l2) {
                const double y0 = std::log(std::abs(frf.channels(c, l0)) + 1e-300);
                const double y1 = std::log(std::abs(frf.channels(c, arg)) + 1e-300);
                const double y2 = std::log(std::abs(frf.channels(c, l2)) + 1e-300);
                valley = parabola_vertex(w(l0), y0, w(arg), y1, w(l2), y2);
            }
            sel.rows(c, 2 * i + 2) = valley;
        }

        for (Eigen::Index j = 1; j < nsf; ++j) {
            if (!(sel.rows(c, j) > sel.rows(c, j - 1)))
                throw NumericError(
                    "selected frequencies: row not strictly increasing (coincident modes?)");
        }
    }
    return sel;
}

PiecewiseLinearMap fit_transform(const Eigen::VectorXd& source_row,
                                 const Eigen::VectorXd& reference_row) {
    if (source_row.size() != reference_row.size())
        throw NumericError("frequency transform: source/reference rows differ in length");
    return PiecewiseLinearMap(source_row, reference_row);
}

PiecewiseLinearMap invert_map(const PiecewiseLinearMap& map) {
    return PiecewiseLinearMap(map.target_knots(), map.source_knots());
}

Eigen::VectorXcd warp_frf(const Eigen::VectorXd& source_grid, const Eigen::VectorXcd& channel,
                          const PiecewiseLinearMap& map, const FrequencyGrid& reference_grid) {
    if (source_grid.size() != channel.size())
        throw NumericError("warp: grid/channel length mismatch");

    const Eigen::VectorXd nu = map.apply(source_grid);
    const double span = nu(nu.size() - 1) - nu(0);
    const double slack = 1e-9 * span;
    if (reference_grid.front() < nu(0) - slack || reference_grid.back() > nu(nu.size() - 1) + slack)
        throw NumericError("warp: reference grid outside the mapped span");

    const CubicSpline re(nu, channel.real());
    const CubicSpline im(nu, channel.imag());
    Eigen::VectorXcd out(reference_grid.size());
    for (Eigen::Index l = 0; l < reference_grid.size(); ++l) {
        const double q = reference_grid.values()(l);
        out(l) = std::complex<double>(re(q), im(q));
    }
    return out;
}

ScaledEnsemble preprocess_ensemble(const std::vector<dynsys::FrfSet>& frfs,
                                   const std::vector<SelectedFrequencies>& selected,
                                   int reference_index) {
    if (frfs.empty()) throw ConfigError("preprocess: empty ensemble");
    if (frfs.size() != selected.size())
        throw ConfigError("preprocess: FRF / selected-frequency count mismatch");
    if (reference_index < 0 || reference_index >= static_cast<int>(frfs.size()))
        throw ConfigError("preprocess: reference index out of range");

    const auto& ref_frf = frfs[static_cast<std::size_t>(reference_index)];
    const auto& ref_sel = selected[static_cast<std::size_t>(reference_index)];
    const Eigen::Index nch = ref_frf.n_channels();
    const Eigen::Index nw = ref_frf.grid.size();
    const Eigen::Index nsf = ref_sel.n_sf();
    const auto n = static_cast<Eigen::Index>(frfs.size());

    for (Eigen::Index k = 0; k < n; ++k) {
        const auto& f = frfs[static_cast<std::size_t>(k)];
        if (!(f.grid == ref_frf.grid))
            throw NumericError("preprocess: realization " + std::to_string(k) +
                               " does not share the common grid");
        if (f.n_channels() != nch)
            throw NumericError("preprocess: realization " + std::to_string(k) +
                               " has a different channel count");
        const auto& s = selected[static_cast<std::size_t>(k)];
        if (s.n_sf() != nsf || s.n_peaks != ref_sel.n_peaks)
            throw NumericError("preprocess: selected-frequency count changed at realization " +
                               std::to_string(k) + " (expected n_sf=" + std::to_string(nsf) +
                               ", got " + std::to_string(s.n_sf()) +
                               "); constant mode count assumption violated");
    }

    ScaledEnsemble out;
    out.reference_index = reference_index;
    out.reference_selected = ref_sel;
    out.reference_grid = ref_frf.grid;  // the reference maps onto itself
    out.n_channels = nch;
    out.n_peaks = ref_sel.n_peaks;
    out.f_table.resize(n, nch * nsf);
    out.g_real.resize(n, nch * nw);
    out.g_imag.resize(n, nch * nw);
    out.reference_trajectory.resize(nch * nw);
    for (Eigen::Index c = 0; c < nch; ++c)
        for (Eigen::Index l = 0; l < nw; ++l)
            out.reference_trajectory(vec_index(c, l, nw)) = ref_frf.channels(c, l);

    for (Eigen::Index k = 0; k < n; ++k) {
        const auto& f = frfs[static_cast<std::size_t>(k)];
        const auto& s = selected[static_cast<std::size_t>(k)];
        for (Eigen::Index c = 0; c < nch; ++c) {
            for (Eigen::Index j = 0; j < nsf; ++j) out.f_table(k, c * nsf + j) = s.rows(c, j);
            const PiecewiseLinearMap map =
                fit_transform(s.rows.row(c).transpose(), ref_sel.rows.row(c).transpose());
            const Eigen::VectorXcd warped =
                warp_frf(f.grid.values(), f.channels.row(c).transpose(), map, out.reference_grid);
            for (Eigen::Index l = 0; l < nw; ++l) {
                out.g_real(k, vec_index(c, l, nw)) = warped(l).real();
                out.g_imag(k, vec_index(c, l, nw)) = warped(l).imag();
            }
        }
    }
    return out;
}

}  // namespace frfpce::sigproc
