// Copyright 2026 The Taxlog Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TAXLOG_BIGINT_HPP_
#define TAXLOG_BIGINT_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace taxlog {

/// Arbitrary-precision signed integer. Tax arithmetic must never overflow
/// silently, so every numeric literal in the logic language is one of these.
/// Stored sign-magnitude with base-1e9 limbs (little endian, no leading
/// zero limbs; zero is the empty limb vector with positive sign).
class BigInt {
 public:
  BigInt() = default;

  BigInt(std::int64_t v) {  // NOLINT: implicit by design, literals are common
    bool neg = v < 0;
    std::uint64_t mag = neg ? 0ull - static_cast<std::uint64_t>(v)
                            : static_cast<std::uint64_t>(v);
    while (mag != 0) {
      limbs_.push_back(static_cast<std::uint32_t>(mag % kBase));
      mag /= kBase;
    }
    negative_ = neg && !limbs_.empty();
  }

  static BigInt from_string(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty integer literal");
    std::size_t i = 0;
    bool neg = false;
    if (s[0] == '-' || s[0] == '+') {
      neg = s[0] == '-';
      i = 1;
    }
    if (i == s.size()) throw std::invalid_argument("sign without digits");
    for (std::size_t k = i; k < s.size(); ++k)
      if (s[k] < '0' || s[k] > '9')
        throw std::invalid_argument("bad digit in integer literal: " + s);
    BigInt r;
    std::size_t ndigits = s.size() - i;
    std::size_t first = ndigits % 9;
    std::size_t pos = i;
    auto push_chunk = [&](std::size_t len) {
      std::uint32_t chunk = 0;
      for (std::size_t k = 0; k < len; ++k)
        chunk = chunk * 10 + static_cast<std::uint32_t>(s[pos + k] - '0');
      pos += len;
      // multiply accumulated value by 1e9 and add chunk
      std::uint64_t carry = chunk;
      for (auto& limb : r.limbs_) {
        std::uint64_t cur = static_cast<std::uint64_t>(limb) * kBase + carry;
        limb = static_cast<std::uint32_t>(cur % kBase);
        carry = cur / kBase;
      }
      while (carry != 0) {
        r.limbs_.push_back(static_cast<std::uint32_t>(carry % kBase));
        carry /= kBase;
      }
    };
    if (first != 0) push_chunk(first);
    while (pos < s.size()) push_chunk(9);
    r.trim();
    r.negative_ = neg && !r.limbs_.empty();
    return r;
  }

  std::string to_string() const {
    if (limbs_.empty()) return "0";
    std::string out = negative_ ? "-" : "";
    out += std::to_string(limbs_.back());
    for (std::size_t i = limbs_.size() - 1; i-- > 0;) {
      std::string part = std::to_string(limbs_[i]);
      out += std::string(9 - part.size(), '0') + part;
    }
    return out;
  }

  bool is_zero() const { return limbs_.empty(); }
  bool is_negative() const { return negative_; }

  /// Returns the value as int64 when it fits, else nullopt.
  std::optional<std::int64_t> to_int64() const {
    if (limbs_.size() > 3) return std::nullopt;
    unsigned __int128 mag = 0;
    for (std::size_t i = limbs_.size(); i-- > 0;) mag = mag * kBase + limbs_[i];
    if (negative_) {
      if (mag > static_cast<unsigned __int128>(
                    static_cast<std::uint64_t>(INT64_MAX) + 1))
        return std::nullopt;
      return static_cast<std::int64_t>(0ull - static_cast<std::uint64_t>(mag));
    }
    if (mag > static_cast<unsigned __int128>(INT64_MAX)) return std::nullopt;
    return static_cast<std::int64_t>(mag);
  }

  BigInt operator-() const {
    BigInt r = *this;
    if (!r.limbs_.empty()) r.negative_ = !r.negative_;
    return r;
  }

  BigInt abs() const {
    BigInt r = *this;
    r.negative_ = false;
    return r;
  }

  friend BigInt operator+(const BigInt& a, const BigInt& b) {
    if (a.negative_ == b.negative_) {
      BigInt r;
      r.limbs_ = add_mag(a.limbs_, b.limbs_);
      r.negative_ = a.negative_ && !r.limbs_.empty();
      return r;
    }
    int c = cmp_mag(a.limbs_, b.limbs_);
    if (c == 0) return BigInt();
    BigInt r;
    if (c > 0) {
      r.limbs_ = sub_mag(a.limbs_, b.limbs_);
      r.negative_ = a.negative_;
    } else {
      r.limbs_ = sub_mag(b.limbs_, a.limbs_);
      r.negative_ = b.negative_;
    }
    r.negative_ = r.negative_ && !r.limbs_.empty();
    return r;
  }

  friend BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

  friend BigInt operator*(const BigInt& a, const BigInt& b) {
    if (a.is_zero() || b.is_zero()) return BigInt();
    BigInt r;
    r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
    for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
      std::uint64_t carry = 0;
      for (std::size_t j = 0; j < b.limbs_.size(); ++j) {
        std::uint64_t cur = static_cast<std::uint64_t>(a.limbs_[i]) *
                                b.limbs_[j] +
                            r.limbs_[i + j] + carry;
        r.limbs_[i + j] = static_cast<std::uint32_t>(cur % kBase);
        carry = cur / kBase;
      }
      std::size_t k = i + b.limbs_.size();
      while (carry != 0) {
        std::uint64_t cur = r.limbs_[k] + carry;
        r.limbs_[k] = static_cast<std::uint32_t>(cur % kBase);
        carry = cur / kBase;
        ++k;
      }
    }
    r.trim();
    r.negative_ = a.negative_ != b.negative_;
    return r;
  }

  /// Quotient/remainder truncated toward zero: |a| = |b|*q + r, 0 <= r < |b|.
  static std::pair<BigInt, BigInt> divmod_trunc(const BigInt& a,
                                                const BigInt& b) {
    if (b.is_zero()) throw std::domain_error("division by zero");
    BigInt q, r;
    div_mag(a.limbs_, b.limbs_, &q.limbs_, &r.limbs_);
    q.trim();
    r.trim();
    q.negative_ = (a.negative_ != b.negative_) && !q.limbs_.empty();
    r.negative_ = a.negative_ && !r.limbs_.empty();
    return {q, r};
  }

  /// Integer division truncating toward negative infinity.
  friend BigInt floor_div(const BigInt& a, const BigInt& b) {
    auto [q, r] = divmod_trunc(a, b);
    if (!r.is_zero() && (a.negative_ != b.negative_)) q = q - BigInt(1);
    return q;
  }

  /// Modulo paired with floor_div: a = floor_div(a,b)*b + floor_mod(a,b).
  friend BigInt floor_mod(const BigInt& a, const BigInt& b) {
    auto [q, r] = divmod_trunc(a, b);
    if (!r.is_zero() && (a.negative_ != b.negative_)) r = r + b;
    return r;
  }

  friend bool operator==(const BigInt& a, const BigInt& b) {
    return a.negative_ == b.negative_ && a.limbs_ == b.limbs_;
  }
  friend bool operator!=(const BigInt& a, const BigInt& b) { return !(a == b); }
  friend bool operator<(const BigInt& a, const BigInt& b) {
    if (a.negative_ != b.negative_) return a.negative_;
    int c = cmp_mag(a.limbs_, b.limbs_);
    return a.negative_ ? c > 0 : c < 0;
  }
  friend bool operator>(const BigInt& a, const BigInt& b) { return b < a; }
  friend bool operator<=(const BigInt& a, const BigInt& b) { return !(b < a); }
  friend bool operator>=(const BigInt& a, const BigInt& b) { return !(a < b); }

  friend const BigInt& min(const BigInt& a, const BigInt& b) {
    return b < a ? b : a;
  }
  friend const BigInt& max(const BigInt& a, const BigInt& b) {
    return a < b ? b : a;
  }

 private:
  static constexpr std::uint64_t kBase = 1000000000ull;

  void trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    if (limbs_.empty()) negative_ = false;
  }

  static int cmp_mag(const std::vector<std::uint32_t>& a,
                     const std::vector<std::uint32_t>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (std::size_t i = a.size(); i-- > 0;)
      if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    return 0;
  }

  static std::vector<std::uint32_t> add_mag(
      const std::vector<std::uint32_t>& a,
      const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> r;
    r.reserve(std::max(a.size(), b.size()) + 1);
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
      std::uint64_t cur = carry;
      if (i < a.size()) cur += a[i];
      if (i < b.size()) cur += b[i];
      r.push_back(static_cast<std::uint32_t>(cur % kBase));
      carry = cur / kBase;
    }
    if (carry != 0) r.push_back(static_cast<std::uint32_t>(carry));
    return r;
  }

  // requires |a| >= |b|
  static std::vector<std::uint32_t> sub_mag(
      const std::vector<std::uint32_t>& a,
      const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> r = a;
    std::int64_t borrow = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      std::int64_t cur = static_cast<std::int64_t>(r[i]) - borrow -
                         (i < b.size() ? b[i] : 0);
      if (cur < 0) {
        cur += static_cast<std::int64_t>(kBase);
        borrow = 1;
      } else {
        borrow = 0;
      }
      r[i] = static_cast<std::uint32_t>(cur);
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
  }

  static std::vector<std::uint32_t> mul_small(
      const std::vector<std::uint32_t>& a, std::uint32_t d) {
    std::vector<std::uint32_t> r;
    r.reserve(a.size() + 1);
    std::uint64_t carry = 0;
    for (std::uint32_t limb : a) {
      std::uint64_t cur = static_cast<std::uint64_t>(limb) * d + carry;
      r.push_back(static_cast<std::uint32_t>(cur % kBase));
      carry = cur / kBase;
    }
    while (carry != 0) {
      r.push_back(static_cast<std::uint32_t>(carry % kBase));
      carry /= kBase;
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
  }

  // schoolbook long division on magnitudes; per-limb digit by binary search
  static void div_mag(const std::vector<std::uint32_t>& a,
                      const std::vector<std::uint32_t>& b,
                      std::vector<std::uint32_t>* q,
                      std::vector<std::uint32_t>* r) {
    q->assign(a.size(), 0);
    r->clear();
    for (std::size_t i = a.size(); i-- > 0;) {
      r->insert(r->begin(), a[i]);
      while (!r->empty() && r->back() == 0) r->pop_back();
      std::uint32_t lo = 0, hi = kBase - 1, digit = 0;
      while (lo <= hi) {
        std::uint32_t mid = lo + (hi - lo) / 2;
        if (cmp_mag(mul_small(b, mid), *r) <= 0) {
          digit = mid;
          lo = mid + 1;
        } else {
          if (mid == 0) break;
          hi = mid - 1;
        }
      }
      (*q)[i] = digit;
      if (digit != 0) *r = sub_mag(*r, mul_small(b, digit));
    }
  }

  std::vector<std::uint32_t> limbs_;
  bool negative_ = false;
};

/// round_half_up(num / den) for den > 0; used for all dollar rounding.
inline BigInt div_round_half_up(const BigInt& num, const BigInt& den) {
  BigInt two(2);
  BigInt twice = num * two + den;
  return floor_div(twice, den * two);
}

}  // namespace taxlog

#endif  // TAXLOG_BIGINT_HPP_
