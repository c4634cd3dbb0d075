#include <doctest.h>

#include <string>

#include "vamos/corruption.hpp"
#include "vamos/projection.hpp"

using namespace vamos;

namespace {

// rows are depth (z), columns lateral (x)
ImageD sample_bscan() {
    ImageD b(2, 3);
    b.at(0, 0) = 1;
    b.at(0, 1) = 5;
    b.at(0, 2) = 2;
    b.at(1, 0) = 4;
    b.at(1, 1) = 0;
    b.at(1, 2) = 6;
    return b;
}

} // namespace

TEST_CASE("axial profiles collapse depth; length = width") {
    const ImageD b = sample_bscan();
    const Profile mx = axial_profile(b, ProjKind::max);
    REQUIRE(mx.length() == 3);
    CHECK(mx.values[0] == 4);
    CHECK(mx.values[1] == 5);
    CHECK(mx.values[2] == 6);
    const Profile av = axial_profile(b, ProjKind::avg);
    CHECK(av.values[0] == doctest::Approx(2.5));
    CHECK(av.values[1] == doctest::Approx(2.5));
    CHECK(av.values[2] == doctest::Approx(4.0));
}

TEST_CASE("lateral profiles collapse width; length = height") {
    const ImageD b = sample_bscan();
    const Profile mx = lateral_profile(b, ProjKind::max);
    REQUIRE(mx.length() == 2);
    CHECK(mx.values[0] == 5);
    CHECK(mx.values[1] == 6);
    const Profile av = lateral_profile(b, ProjKind::avg);
    CHECK(av.values[0] == doctest::Approx(8.0 / 3.0));
    CHECK(av.values[1] == doctest::Approx(10.0 / 3.0));
}

TEST_CASE("axial profile of an image equals lateral profile of its transpose") {
    const ImageD b = sample_bscan();
    ImageD t(b.width, b.height);
    for (int y = 0; y < b.height; ++y)
        for (int x = 0; x < b.width; ++x) t.at(x, y) = b.at(y, x);
    for (ProjKind kind : {ProjKind::max, ProjKind::avg}) {
        const Profile pa = axial_profile(b, kind);
        const Profile pl = lateral_profile(t, kind);
        REQUIRE(pa.length() == pl.length());
        for (int i = 0; i < pa.length(); ++i)
            CHECK(pa.values[static_cast<std::size_t>(i)]
                  == pl.values[static_cast<std::size_t>(i)]);
    }
}

TEST_CASE("profile_of dispatches on axis") {
    const ImageD b = sample_bscan();
    CHECK(profile_of(b, Axis::axial, ProjKind::max).length() == b.width);
    CHECK(profile_of(b, Axis::lateral, ProjKind::max).length() == b.height);
}

TEST_CASE("en face MIP takes per-slice axial maxima") {
    Volume v(2, 2, 3);
    // slice 0 = sample_bscan, slice 1 = constant 0.5
    const ImageD b = sample_bscan();
    for (int z = 0; z < 2; ++z)
        for (int x = 0; x < 3; ++x) {
            v.at(0, z, x) = static_cast<float>(b.at(z, x));
            v.at(1, z, x) = 0.5f;
        }
    const ImageF mip = enface_mip(v);
    REQUIRE(mip.height == 2); // one row per slice
    REQUIRE(mip.width == 3);
    CHECK(mip.at(0, 0) == 4.0f);
    CHECK(mip.at(0, 1) == 5.0f);
    CHECK(mip.at(0, 2) == 6.0f);
    CHECK(mip.at(1, 0) == 0.5f);
}

TEST_CASE("en face rows are zero exactly for blanked slices") {
    Volume v(4, 3, 5, 0.25f);
    ValidityMask mask(4, true);
    mask.set_valid(2, false);
    const ImageF mip = enface_mip(apply_mask(v, mask));
    for (int n = 0; n < 4; ++n) {
        bool all_zero = true;
        for (int x = 0; x < 5; ++x) all_zero &= (mip.at(n, x) == 0.0f);
        CHECK(all_zero == !mask.valid(n));
    }
}

TEST_CASE("quantize_u8 rounds half up and clamps") {
    CHECK(quantize_u8(0.0) == 0);
    CHECK(quantize_u8(1.0) == 255);
    CHECK(quantize_u8(0.5) == 128); // 127.5 + 0.5 -> 128
    CHECK(quantize_u8(127.0 / 255.0) == 127);
    CHECK(quantize_u8(-0.3) == 0);
    CHECK(quantize_u8(2.0) == 255);
}

TEST_CASE("write_pgm emits exact header and payload bytes") {
    ImageF img(2, 2);
    img.at(0, 0) = 0.0f;
    img.at(0, 1) = 0.5f;
    img.at(1, 0) = 0.5f;
    img.at(1, 1) = 1.0f;
    const std::string path = "/tmp/vamos_test_proj.pgm";
    write_pgm(img, path);
    const std::string bytes = detail::read_file_bytes(path);
    const std::string expect = std::string("P5\n2 2\n255\n")
                               + static_cast<char>(0) + static_cast<char>(128)
                               + static_cast<char>(128) + static_cast<char>(255);
    CHECK(bytes == expect);
}

TEST_CASE("empty B-scan rejected") {
    CHECK_THROWS_AS(axial_profile(ImageD(), ProjKind::max), shape_error);
    CHECK_THROWS_AS(lateral_profile(ImageD(), ProjKind::avg), shape_error);
}
