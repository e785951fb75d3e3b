#pragma once

#include "ttno/symbolic.hpp"
#include "ttno/topology.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <map>
#include <string>
#include <vector>

#include <sodium.h>

namespace ttno {

/// 128-bit keyed BLAKE2b digest.
struct SubtreeDigest {
  std::array<std::uint8_t, 16> bytes{};

  std::string hex() const;
  friend bool operator==(const SubtreeDigest &a, const SubtreeDigest &b) {
    return a.bytes == b.bytes;
  }
  friend bool operator!=(const SubtreeDigest &a, const SubtreeDigest &b) {
    return a.bytes != b.bytes;
  }
  friend bool operator<(const SubtreeDigest &a, const SubtreeDigest &b) {
    return a.bytes < b.bytes;
  }
};

struct SubtreeDigestHash {
  std::size_t operator()(const SubtreeDigest &d) const {
    std::size_t h;
    std::memcpy(&h, d.bytes.data(), sizeof h);
    return h;
  }
};

/// Incremental digest. Byte layout: one tag byte, then the fields in the
/// order they are added. Strings are prefixed by their length as a
/// little-endian u32; counts are little-endian u32; digests are raw 16 bytes.
/// Coefficients are encoded as the strings "num/den" and the symbol name.
class DigestBuilder {
public:
  explicit DigestBuilder(char tag);
  DigestBuilder &add(std::uint32_t v);
  DigestBuilder &add(const std::string &s);
  DigestBuilder &add(const SubtreeDigest &d);
  DigestBuilder &add(const Coefficient &c);
  SubtreeDigest finish();

private:
  crypto_generichash_state state_;
};

/// Labeled ordered tree, used for hashing plain label assignments.
struct LabeledTree {
  std::string label;
  std::vector<LabeledTree> children;
};

/// Merkle digest: H('T', label, child count, child digests in order).
SubtreeDigest tree_digest(const LabeledTree &t);

/// Digest of the leaf-side subtree of bond with the given per-node labels
/// (missing nodes carry the identity). Children in ascending node id.
SubtreeDigest subtree_digest(const TreeTopology &t, const Bond &bond,
                             const std::map<int, std::string> &labels);

/// Digest of a root-side fragment: H('V', cut label, slot count,
/// (slot index, digest) pairs). Slot order is significant.
SubtreeDigest v_subtree_digest(const std::string &cut_label,
                               const std::vector<SubtreeDigest> &attached);

} // namespace ttno
