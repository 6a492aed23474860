#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "vmcoal/errors.hpp"
#include "vmcoal/linalg.hpp"

namespace vmcoal {

// Cluster composition: x[i] = number of particles of type i.  Nonnegative,
// at least one positive entry.
class Composition {
  public:
    Composition() = default;
    explicit Composition(std::vector<int> parts);

    int dim() const { return static_cast<int>(parts_.size()); }
    int total() const { return total_; }  // n_x
    int operator[](int i) const { return parts_[i]; }
    const std::vector<int>& parts() const { return parts_; }

    std::vector<int> support() const;
    Vector as_vector() const;

    // "x1:x2:...:xk"
    std::string key() const;
    static Composition parse(const std::string& key);

    bool operator==(const Composition& o) const { return parts_ == o.parts_; }
    bool operator<(const Composition& o) const;  // graded, then lexicographic

  private:
    std::vector<int> parts_;
    int total_ = 0;
};

// All compositions of dimension k with total exactly n, lexicographic order.
std::vector<Composition> compositions_of(int k, int n);

// All compositions with 1 <= total <= n_max, graded lexicographic order.
std::vector<Composition> graded_compositions(int k, int n_max);

// Ordered splits x = y + z with both parts nonzero, paired with the index of
// y's complement; enumerated deterministically.
std::vector<std::pair<Composition, Composition>> ordered_splits(const Composition& x);

double log_factorial(const Composition& x);          // log(x!) = sum_i log(x_i!)
double bilinear(const Matrix& v, const Composition& a, const Composition& b);   // <a|V|b>
double bilinear(const Matrix& v, const Composition& a, const Vector& b);

// Dense index over graded_compositions(k, n_max) with O(1) lookup by parts.
class CompositionIndex {
  public:
    CompositionIndex(int k, int n_max);

    int size() const { return static_cast<int>(list_.size()); }
    const Composition& at(int i) const { return list_[i]; }
    int find(const std::vector<int>& parts) const;  // -1 if absent
    int n_max() const { return n_max_; }
    int dim() const { return k_; }

  private:
    int k_;
    int n_max_;
    std::vector<Composition> list_;
    std::map<std::vector<int>, int> pos_;
};

}  // namespace vmcoal
