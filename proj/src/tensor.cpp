#include "ossgan/tensor.hpp"

#include <cmath>
#include <sstream>

#include "ossgan/errors.hpp"

namespace ossgan {

namespace {
int64_t checked_numel(const std::vector<int64_t>& shape) {
    int64_t n = 1;
    for (int64_t d : shape) {
        if (d < 0) throw ValidationError("tensor dimension must be nonnegative");
        n *= d;
    }
    return n;
}
}  // namespace

Tensor::Tensor(std::vector<int64_t> shape)
    : shape_(std::move(shape)), numel_(checked_numel(shape_)) {
    data_.assign(static_cast<size_t>(numel_), 0.0);
}

Tensor::Tensor(std::vector<int64_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)), numel_(checked_numel(shape_)) {
    if (static_cast<int64_t>(data_.size()) != numel_)
        throw ValidationError("tensor data size does not match shape");
}

Tensor Tensor::full(std::vector<int64_t> shape, double v) {
    Tensor t(std::move(shape));
    t.fill(v);
    return t;
}

Tensor Tensor::row(std::vector<double> v) {
    const int64_t n = static_cast<int64_t>(v.size());
    return Tensor({n}, std::move(v));
}

int64_t Tensor::offset(std::initializer_list<int64_t> idx) const {
    if (idx.size() != shape_.size())
        throw ValidationError("tensor index rank mismatch");
    int64_t off = 0;
    size_t k = 0;
    for (int64_t i : idx) {
        if (i < 0 || i >= shape_[k]) throw ValidationError("tensor index out of range");
        off = off * shape_[k] + i;
        ++k;
    }
    return off;
}

double& Tensor::at(std::initializer_list<int64_t> idx) {
    return data_[static_cast<size_t>(offset(idx))];
}

double Tensor::at(std::initializer_list<int64_t> idx) const {
    return data_[static_cast<size_t>(offset(idx))];
}

Tensor Tensor::reshaped(std::vector<int64_t> shape) const {
    Tensor t(std::move(shape), data_);
    return t;
}

void Tensor::fill(double v) {
    for (auto& x : data_) x = v;
}

bool Tensor::all_finite() const {
    for (double x : data_)
        if (!std::isfinite(x)) return false;
    return true;
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < shape_.size(); ++i) os << (i ? "," : "") << shape_[i];
    os << "]";
    return os.str();
}

}  // namespace ossgan
