#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "diskrot/errors.hpp"

namespace diskrot {

/// Order-independent summation of doubles.
///
/// Each addend is deposited exactly into a fixed-point accumulator spanning
/// 2^-1074 .. 2^205, so the accumulated value is the exact real sum and does
/// not depend on the order in which terms arrive. Two engines that visit the
/// same multiset of terms in different orders therefore read back
/// bit-identical doubles.
class ExactSum {
public:
    void add(double v) {
        if (v == 0.0) return;
        if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "ExactSum: non-finite addend");
        int exp = 0;
        const double frac = std::frexp(std::abs(v), &exp);
        auto mant = static_cast<std::uint64_t>(std::ldexp(frac, 53));
        int e = exp - 53;
        if (e < kMinExp) {
            mant >>= (kMinExp - e);
            e = kMinExp;
        }
        const int offset = e - kMinExp;
        const int limb = offset / 32;
        const int shift = offset % 32;
        if (limb + 2 >= kLimbs) fail(ErrorKind::InvalidArgument, "ExactSum: addend magnitude out of range");
        const unsigned __int128 wide = static_cast<unsigned __int128>(mant) << shift;
        const std::int64_t sign = v < 0.0 ? -1 : 1;
        limbs_[limb] += sign * static_cast<std::int64_t>(wide & 0xffffffffu);
        limbs_[limb + 1] += sign * static_cast<std::int64_t>((wide >> 32) & 0xffffffffu);
        limbs_[limb + 2] += sign * static_cast<std::int64_t>(wide >> 64);
        if (++pending_ >= (1u << 29)) normalize();
    }

    ExactSum& operator+=(double v) {
        add(v);
        return *this;
    }

    void merge(const ExactSum& other) {
        ExactSum o = other;
        o.normalize();
        normalize();
        for (int i = 0; i < kLimbs; ++i) limbs_[i] += o.limbs_[i];
        normalize();
    }

    /// Deterministic rounding of the exact sum (within a few ulps of correct rounding).
    double value() const {
        ExactSum c = *this;
        c.normalize();
        double out = 0.0;
        for (int i = kLimbs - 1; i >= 0; --i) {
            if (c.limbs_[i] != 0) out += std::ldexp(static_cast<double>(c.limbs_[i]), 32 * i + kMinExp);
        }
        return out;
    }

    friend bool operator==(const ExactSum& a, const ExactSum& b) {
        ExactSum x = a, y = b;
        x.normalize();
        y.normalize();
        return x.limbs_ == y.limbs_;
    }

private:
    static constexpr int kMinExp = -1074;
    static constexpr int kLimbs = 40;

    void normalize() {
        for (int i = 0; i + 1 < kLimbs; ++i) {
            std::int64_t carry = limbs_[i] >> 32;  // arithmetic shift: floor division
            limbs_[i] -= carry * (std::int64_t{1} << 32);
            limbs_[i + 1] += carry;
        }
        pending_ = 0;
    }

    std::array<std::int64_t, kLimbs> limbs_{};
    unsigned pending_ = 0;
};

}  // namespace diskrot
