#pragma once

#include <cstddef>
#include <vector>

#include "vamos/common.hpp"

namespace vamos {

// Row-major 2D image. For B-scans rows index depth (z, length H) and
// columns index the lateral dimension (x, length W).
template <class T>
struct Image2D {
    int height = 0;
    int width = 0;
    std::vector<T> v;

    Image2D() = default;
    Image2D(int h, int w, T fill = T(0)) : height(h), width(w) {
        if (h <= 0 || w <= 0) throw shape_error("Image2D: non-positive dimensions");
        v.assign(static_cast<std::size_t>(h) * w, fill);
    }

    T& at(int y, int x) { return v[static_cast<std::size_t>(y) * width + x]; }
    const T& at(int y, int x) const { return v[static_cast<std::size_t>(y) * width + x]; }

    std::size_t size() const { return v.size(); }
    bool same_shape(const Image2D& o) const { return height == o.height && width == o.width; }
};

using ImageF = Image2D<float>;
using ImageD = Image2D<double>;

template <class T, class U>
Image2D<T> convert(const Image2D<U>& src) {
    Image2D<T> out(src.height, src.width);
    for (std::size_t i = 0; i < src.v.size(); ++i) out.v[i] = static_cast<T>(src.v[i]);
    return out;
}

template <class T>
void require_same_shape(const Image2D<T>& a, const Image2D<T>& b, const char* what) {
    if (!a.same_shape(b)) throw shape_error(std::string(what) + ": shape mismatch");
}

} // namespace vamos
