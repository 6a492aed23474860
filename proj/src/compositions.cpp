#include "vmcoal/compositions.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace vmcoal {

Composition::Composition(std::vector<int> parts) : parts_(std::move(parts)) {
    if (parts_.empty()) throw validation_error("Composition: empty");
    total_ = 0;
    for (int p : parts_) {
        if (p < 0) throw validation_error("Composition: negative part");
        total_ += p;
    }
    if (total_ == 0) throw validation_error("Composition: all parts zero");
}

std::vector<int> Composition::support() const {
    std::vector<int> s;
    for (int i = 0; i < dim(); ++i)
        if (parts_[i] > 0) s.push_back(i);
    return s;
}

Vector Composition::as_vector() const {
    Vector v(dim());
    for (int i = 0; i < dim(); ++i) v[i] = parts_[i];
    return v;
}

std::string Composition::key() const {
    std::ostringstream os;
    for (int i = 0; i < dim(); ++i) {
        if (i) os << ':';
        os << parts_[i];
    }
    return os.str();
}

Composition Composition::parse(const std::string& key) {
    std::vector<int> parts;
    std::istringstream is(key);
    std::string tok;
    while (std::getline(is, tok, ':')) {
        size_t used = 0;
        int value = 0;
        try {
            value = std::stoi(tok, &used);
        } catch (const std::exception&) {
            throw validation_error("Composition: bad token '" + tok + "'");
        }
        if (used != tok.size()) throw validation_error("Composition: bad token '" + tok + "'");
        parts.push_back(value);
    }
    return Composition(parts);
}

bool Composition::operator<(const Composition& o) const {
    if (total_ != o.total_) return total_ < o.total_;
    return parts_ < o.parts_;
}

namespace {

void emit_compositions(int k, int n, std::vector<int>& scratch, int pos,
                       std::vector<Composition>& out) {
    if (pos == k - 1) {
        scratch[pos] = n;
        out.emplace_back(scratch);
        return;
    }
    for (int v = 0; v <= n; ++v) {
        scratch[pos] = v;
        emit_compositions(k, n - v, scratch, pos + 1, out);
    }
}

}  // namespace

std::vector<Composition> compositions_of(int k, int n) {
    if (k < 1 || n < 1) throw validation_error("compositions_of: k and n must be positive");
    std::vector<Composition> out;
    std::vector<int> scratch(k, 0);
    emit_compositions(k, n, scratch, 0, out);
    return out;
}

std::vector<Composition> graded_compositions(int k, int n_max) {
    std::vector<Composition> out;
    for (int n = 1; n <= n_max; ++n) {
        auto shell = compositions_of(k, n);
        out.insert(out.end(), shell.begin(), shell.end());
    }
    return out;
}

std::vector<std::pair<Composition, Composition>> ordered_splits(const Composition& x) {
    const int k = x.dim();
    std::vector<std::pair<Composition, Composition>> out;
    std::vector<int> y(k, 0);
    // Odometer over the box [0,x]; skip y = 0 and y = x.
    while (true) {
        int pos = 0;
        while (pos < k && y[pos] == x[pos]) {
            y[pos] = 0;
            ++pos;
        }
        if (pos == k) break;
        ++y[pos];
        int ny = std::accumulate(y.begin(), y.end(), 0);
        if (ny == 0 || ny == x.total()) continue;
        std::vector<int> z(k);
        for (int i = 0; i < k; ++i) z[i] = x[i] - y[i];
        out.emplace_back(Composition(y), Composition(z));
    }
    return out;
}

double log_factorial(const Composition& x) {
    double s = 0.0;
    for (int i = 0; i < x.dim(); ++i) s += std::lgamma(static_cast<double>(x[i]) + 1.0);
    return s;
}

double bilinear(const Matrix& v, const Composition& a, const Composition& b) {
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) {
        if (a[i] == 0) continue;
        double row = 0.0;
        for (int j = 0; j < b.dim(); ++j) row += v(i, j) * b[j];
        s += a[i] * row;
    }
    return s;
}

double bilinear(const Matrix& v, const Composition& a, const Vector& b) {
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) {
        if (a[i] == 0) continue;
        s += a[i] * v.row(i).dot(b);
    }
    return s;
}

CompositionIndex::CompositionIndex(int k, int n_max)
    : k_(k), n_max_(n_max), list_(graded_compositions(k, n_max)) {
    for (int i = 0; i < size(); ++i) pos_[list_[i].parts()] = i;
}

int CompositionIndex::find(const std::vector<int>& parts) const {
    auto it = pos_.find(parts);
    return it == pos_.end() ? -1 : it->second;
}

}  // namespace vmcoal
