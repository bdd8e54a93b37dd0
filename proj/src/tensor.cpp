#include "fggpp/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fgg {

namespace {

std::size_t volume(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (auto s : shape)
        n *= s;
    return n;
}

}  // namespace

WeightTensor::WeightTensor(std::vector<std::string> domains, std::vector<std::size_t> shape, double fill)
    : domains_(std::move(domains)), shape_(std::move(shape)), data_(volume(shape_), fill) {}

WeightTensor::WeightTensor(std::vector<std::string> domains, std::vector<std::size_t> shape,
                           std::vector<double> data)
    : domains_(std::move(domains)), shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != volume(shape_))
        throw std::invalid_argument("tensor data does not match its shape");
}

std::size_t WeightTensor::offset(std::span<const std::size_t> index) const {
    if (index.size() != shape_.size())
        throw std::out_of_range("tensor index has wrong rank");
    std::size_t off = 0;
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        if (index[i] >= shape_[i])
            throw std::out_of_range("tensor index out of range");
        off = off * shape_[i] + index[i];
    }
    return off;
}

double& WeightTensor::at(std::span<const std::size_t> index) { return data_[offset(index)]; }
double WeightTensor::at(std::span<const std::size_t> index) const { return data_[offset(index)]; }

double WeightTensor::sum() const {
    double s = 0.0;
    for (double x : data_)
        s += x;
    return s;
}

double WeightTensor::max() const {
    double m = 0.0;
    for (double x : data_)
        m = std::max(m, x);
    return m;
}

double sup_distance(const WeightTensor& a, const WeightTensor& b) {
    if (a.shape() != b.shape())
        throw std::invalid_argument("sup_distance on tensors of different shape");
    double d = 0.0;
    auto x = a.data();
    auto y = b.data();
    for (std::size_t i = 0; i < x.size(); ++i)
        d = std::max(d, std::abs(x[i] - y[i]));
    return d;
}

bool next_index(std::vector<std::size_t>& index, std::span<const std::size_t> shape) {
    for (std::size_t i = index.size(); i-- > 0;) {
        if (++index[i] < shape[i])
            return true;
        index[i] = 0;
    }
    return false;
}

}  // namespace fgg
