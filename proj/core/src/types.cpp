#include "surroflow/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace surroflow {

Domain::Domain(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
    if (intervals_.empty()) throw InvalidInput("domain must have at least one dimension");
    for (std::size_t d = 0; d < intervals_.size(); ++d) {
        const auto& iv = intervals_[d];
        if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi)) {
            std::ostringstream os;
            os << "degenerate interval in dimension " << d << ": [" << iv.lo << ", " << iv.hi << "]";
            throw InvalidInput(os.str());
        }
    }
}

bool Domain::contains(std::span<const double> x, double tol) const {
    if (x.size() != dim()) return false;
    for (std::size_t d = 0; d < dim(); ++d) {
        if (!intervals_[d].contains(x[d], tol)) return false;
    }
    return true;
}

Point Domain::midpoint() const {
    Point p(dim());
    for (std::size_t d = 0; d < dim(); ++d) p[d] = intervals_[d].mid();
    return p;
}

Point Domain::clamp(std::span<const double> x) const {
    require_dim(x, dim(), "Domain::clamp");
    Point p(x.begin(), x.end());
    for (std::size_t d = 0; d < dim(); ++d) p[d] = std::clamp(p[d], intervals_[d].lo, intervals_[d].hi);
    return p;
}

std::vector<Point> Domain::corners() const {
    const std::size_t n = dim();
    const std::size_t count = std::size_t{1} << n;
    std::vector<Point> out;
    out.reserve(count);
    for (std::size_t mask = 0; mask < count; ++mask) {
        Point p(n);
        for (std::size_t d = 0; d < n; ++d) p[d] = (mask >> d) & 1U ? intervals_[d].hi : intervals_[d].lo;
        out.push_back(std::move(p));
    }
    return out;
}

double Domain::min_width() const {
    double w = intervals_.front().width();
    for (const auto& iv : intervals_) w = std::min(w, iv.width());
    return w;
}

void require_dim(std::span<const double> x, std::size_t n, const char* what) {
    if (x.size() != n) {
        std::ostringstream os;
        os << what << ": expected dimension " << n << ", got " << x.size();
        throw InvalidInput(os.str());
    }
}

double Grid2D::min() const { return *std::min_element(data_.begin(), data_.end()); }
double Grid2D::max() const { return *std::max_element(data_.begin(), data_.end()); }

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace surroflow
