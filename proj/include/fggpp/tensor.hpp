#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fgg {

// Dense nonnegative tensor over a sequence of named domains (row-major).
class WeightTensor {
  public:
    WeightTensor() : data_(1, 0.0) {}
    WeightTensor(std::vector<std::string> domains, std::vector<std::size_t> shape, double fill = 0.0);
    WeightTensor(std::vector<std::string> domains, std::vector<std::size_t> shape, std::vector<double> data);

    std::size_t rank() const { return shape_.size(); }
    const std::vector<std::string>& domains() const { return domains_; }
    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t size() const { return data_.size(); }

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    double& at(std::span<const std::size_t> index);
    double at(std::span<const std::size_t> index) const;
    std::size_t offset(std::span<const std::size_t> index) const;

    double sum() const;
    // Largest entry.
    double max() const;

  private:
    std::vector<std::string> domains_;
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

// max_i |a_i - b_i|; shapes must agree.
double sup_distance(const WeightTensor& a, const WeightTensor& b);

// Steps a mixed-radix counter; returns false after the last index.
bool next_index(std::vector<std::size_t>& index, std::span<const std::size_t> shape);

}  // namespace fgg
