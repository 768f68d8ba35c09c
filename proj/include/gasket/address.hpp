#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "gasket/config.hpp"
#include "gasket/error.hpp"

namespace gasket {

// Finite word over {0,1,2} addressing the cell F_w(SG). The empty word is the
// identity map. Packed two bits per digit, most significant digit first.
class Word {
 public:
  Word() = default;

  static Word parse(std::string_view s) {
    Word w;
    for (char c : s) {
      if (c < '0' || c > '2') throw ParseError("bad word digit '" + std::string(1, c) + "'");
      w = w.append(c - '0');
    }
    return w;
  }

  int size() const { return len_; }
  bool empty() const { return len_ == 0; }

  int digit(int i) const { return int((bits_ >> (2 * i)) & 3u); }
  int last() const { return digit(len_ - 1); }

  Word append(int d) const {
    if (len_ >= kHardLevelCap) throw DomainError("word length exceeds hard cap");
    Word w = *this;
    w.bits_ |= uint64_t(d) << (2 * len_);
    w.len_ = len_ + 1;
    return w;
  }

  Word prefix(int n) const {
    Word w;
    w.len_ = n;
    w.bits_ = bits_ & ((n >= 32) ? ~uint64_t(0) : ((uint64_t(1) << (2 * n)) - 1));
    return w;
  }

  Word drop_last() const { return prefix(len_ - 1); }

  Word concat(const Word& other) const {
    Word w = *this;
    for (int i = 0; i < other.len_; ++i) w = w.append(other.digit(i));
    return w;
  }

  bool is_prefix_of(const Word& other) const {
    return len_ <= other.len_ && other.prefix(len_).bits_ == bits_;
  }

  bool all_in_12() const {
    for (int i = 0; i < len_; ++i)
      if (digit(i) == 0) return false;
    return true;
  }

  std::string str() const {
    std::string s(len_, '0');
    for (int i = 0; i < len_; ++i) s[i] = char('0' + digit(i));
    return s;
  }

  // Lexicographic on the digit sequence, shorter prefixes first.
  int compare(const Word& o) const {
    int n = std::min(len_, o.len_);
    for (int i = 0; i < n; ++i) {
      int d = digit(i) - o.digit(i);
      if (d != 0) return d;
    }
    return len_ - o.len_;
  }

  uint64_t packed() const { return (uint64_t(len_) << 48) | bits_; }

  friend bool operator==(const Word&, const Word&) = default;

 private:
  uint64_t bits_ = 0;
  int len_ = 0;
};

// The subinterval [(k-1)/2^n, k/2^n] of I, i.e. F_{w(n,k)}([0,1]).
struct PairIndex {
  int n = 0;
  uint64_t k = 1;

  PairIndex() = default;
  PairIndex(int n_, uint64_t k_) : n(n_), k(k_) {
    if (n < 0 || n > kHardLevelCap || k < 1 || k > (uint64_t(1) << n))
      throw DomainError("invalid pair index (" + std::to_string(n_) + "," + std::to_string(k_) + ")");
  }

  friend bool operator==(const PairIndex&, const PairIndex&) = default;
};

// Dyadic rational k/2^n on I.
struct DyadicPoint {
  int n = 0;
  uint64_t k = 0;

  DyadicPoint() = default;
  DyadicPoint(int n_, uint64_t k_) : n(n_), k(k_) {
    if (n < 0 || n > kHardLevelCap || k > (uint64_t(1) << n))
      throw DomainError("invalid dyadic point " + std::to_string(k_) + "/2^" + std::to_string(n_));
  }

  DyadicPoint reduced() const {
    DyadicPoint p = *this;
    while (p.n > 0 && p.k % 2 == 0) {
      p.k /= 2;
      p.n -= 1;
    }
    return p;
  }

  double value() const { return double(k) / double(uint64_t(1) << n); }

  friend bool operator==(const DyadicPoint& a, const DyadicPoint& b) {
    auto ra = a.reduced(), rb = b.reduced();
    return ra.n == rb.n && ra.k == rb.k;
  }
};

// Orientation of the bottom line: 0 = q1, 1 = q2 (the convention that makes
// w(n,1) = 11...1 cover [0, 2^-n]). Digit 1 maps to the left half, 2 to the right.
inline Word word_of(const PairIndex& p) {
  Word w;
  for (int i = p.n - 1; i >= 0; --i) w = w.append(((p.k - 1) >> i & 1) ? 2 : 1);
  return w;
}

inline PairIndex pair_of_word(const Word& w) {
  if (!w.all_in_12()) throw DomainError("word contains digit 0, not a bottom-line cell");
  uint64_t k = 0;
  for (int i = 0; i < w.size(); ++i) k = 2 * k + (w.digit(i) == 2 ? 1 : 0);
  return PairIndex(w.size(), k + 1);
}

// Non-abelian '+': word_of(result) = word_of(p) word_of(q).
inline PairIndex pair_add(const PairIndex& p, const PairIndex& q) {
  return PairIndex(p.n + q.n, ((p.k - 1) << q.n) + (q.k - 1) + 1);
}

// p >= q in the pair order: p's interval is contained in q's, i.e. word_of(q)
// is a prefix of word_of(p).
inline bool pair_geq(const PairIndex& p, const PairIndex& q) {
  if (p.n < q.n) return false;
  return ((p.k - 1) >> (p.n - q.n)) == q.k - 1;
}

inline DyadicPoint left_endpoint(const PairIndex& p) { return DyadicPoint(p.n, p.k - 1); }
inline DyadicPoint right_endpoint(const PairIndex& p) { return DyadicPoint(p.n, p.k); }

// Canonical vertex address F_w q_c. Every non-boundary vertex has exactly two
// same-length raw addresses F_{w'i} q_j = F_{w'j} q_i; the canonical form is
// the lexicographically smaller one, with trailing digits equal to the corner
// stripped first (F_{wc} q_c = F_w q_c). Boundary vertices carry the empty word.
struct VertexId {
  Word word;
  int corner = 0;

  int level() const { return word.size(); }

  std::string str() const { return word.str() + ":" + std::to_string(corner); }

  uint64_t packed() const { return (word.packed() << 2) | uint64_t(corner); }

  friend bool operator==(const VertexId&, const VertexId&) = default;

  // Raw-address order: word digits, then corner.
  int compare(const VertexId& o) const {
    int c = word.compare(o.word);
    if (c != 0) return c;
    return corner - o.corner;
  }
};

inline VertexId canonical_vertex(Word w, int corner) {
  if (corner < 0 || corner > 2) throw DomainError("corner index out of range");
  while (!w.empty() && w.last() == corner) w = w.drop_last();
  if (w.empty()) return VertexId{w, corner};
  VertexId a{w, corner};
  VertexId b{w.drop_last().append(corner), w.last()};
  return a.compare(b) <= 0 ? a : b;
}

inline bool is_canonical(const VertexId& v) {
  return canonical_vertex(v.word, v.corner) == v;
}

// The other same-length raw address of a non-boundary vertex.
inline std::optional<VertexId> twin_address(const VertexId& v) {
  if (v.word.empty()) return std::nullopt;
  return VertexId{v.word.drop_last().append(v.corner), v.word.last()};
}

inline VertexId parse_vertex(std::string_view s) {
  auto colon = s.find(':');
  if (colon == std::string_view::npos) throw ParseError("vertex string missing ':'");
  Word w = Word::parse(s.substr(0, colon));
  auto cs = s.substr(colon + 1);
  if (cs.size() != 1 || cs[0] < '0' || cs[0] > '2')
    throw ParseError("bad corner in vertex string '" + std::string(s) + "'");
  return canonical_vertex(w, cs[0] - '0');
}

// Dyadic coordinate of a bottom-line vertex; absent off the line. With the
// adopted orientation the line vertices are q1 (-> 0), q2 (-> 1) and the
// canonical midpoints F_{w.1} q_2 for w over {1,2}.
inline std::optional<DyadicPoint> dyadic_of_vertex(const VertexId& v) {
  if (v.word.empty()) {
    if (v.corner == 1) return DyadicPoint(0, 0);
    if (v.corner == 2) return DyadicPoint(0, 1);
    return std::nullopt;
  }
  if (!v.word.all_in_12() || (v.corner != 1 && v.corner != 2)) return std::nullopt;
  PairIndex p = pair_of_word(v.word);
  return (v.corner == 1 ? left_endpoint(p) : right_endpoint(p)).reduced();
}

// Canonical vertex at the dyadic point k/2^n.
inline VertexId vertex_of_dyadic(const DyadicPoint& d) {
  DyadicPoint r = d.reduced();
  if (r.n == 0) return VertexId{Word(), r.k == 0 ? 1 : 2};
  return canonical_vertex(word_of(PairIndex(r.n, r.k)), 2);
}

// x_(n,k) = F_{w(n,k)} q_0, the apex of the bottom cell.
inline VertexId apex_vertex(const PairIndex& p) { return canonical_vertex(word_of(p), 0); }

}  // namespace gasket
