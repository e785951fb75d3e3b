#include "ttno/digest.hpp"

#include <stdexcept>

namespace ttno {

namespace {

const unsigned char kKey[16] = {'t', 't', 'n', 'o', '-', 's', 'u', 'b',
                                't', 'r', 'e', 'e', '-', 'k', 'e', 'y'};

struct SodiumInit {
  SodiumInit() {
    if (sodium_init() < 0)
      throw std::runtime_error("libsodium initialization failed");
  }
};

} // namespace

std::string SubtreeDigest::hex() const {
  static const char *digits = "0123456789abcdef";
  std::string out;
  for (auto b : bytes) {
    out += digits[b >> 4];
    out += digits[b & 15];
  }
  return out;
}

DigestBuilder::DigestBuilder(char tag) {
  static SodiumInit init;
  crypto_generichash_init(&state_, kKey, sizeof kKey, 16);
  auto t = static_cast<unsigned char>(tag);
  crypto_generichash_update(&state_, &t, 1);
}

DigestBuilder &DigestBuilder::add(std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  crypto_generichash_update(&state_, b, 4);
  return *this;
}

DigestBuilder &DigestBuilder::add(const std::string &s) {
  add(static_cast<std::uint32_t>(s.size()));
  crypto_generichash_update(
      &state_, reinterpret_cast<const unsigned char *>(s.data()), s.size());
  return *this;
}

DigestBuilder &DigestBuilder::add(const SubtreeDigest &d) {
  crypto_generichash_update(&state_, d.bytes.data(), d.bytes.size());
  return *this;
}

DigestBuilder &DigestBuilder::add(const Coefficient &c) {
  add(c.rational().get_str());
  add(c.symbol().name());
  return *this;
}

SubtreeDigest DigestBuilder::finish() {
  SubtreeDigest d;
  crypto_generichash_final(&state_, d.bytes.data(), d.bytes.size());
  return d;
}

SubtreeDigest tree_digest(const LabeledTree &t) {
  std::vector<SubtreeDigest> kids;
  for (const auto &c : t.children)
    kids.push_back(tree_digest(c));
  DigestBuilder b('T');
  b.add(t.label).add(static_cast<std::uint32_t>(kids.size()));
  for (const auto &k : kids)
    b.add(k);
  return b.finish();
}

SubtreeDigest subtree_digest(const TreeTopology &t, const Bond &bond,
                             const std::map<int, std::string> &labels) {
  t.bond_index(bond);
  auto build = [&](auto &&self, int node) -> LabeledTree {
    LabeledTree out;
    auto it = labels.find(node);
    out.label = it == labels.end() ? std::string(kIdentity) : it->second;
    for (int c : t.children(node))
      out.children.push_back(self(self, c));
    return out;
  };
  return tree_digest(build(build, bond.child));
}

SubtreeDigest v_subtree_digest(const std::string &cut_label,
                               const std::vector<SubtreeDigest> &attached) {
  DigestBuilder b('V');
  b.add(cut_label).add(static_cast<std::uint32_t>(attached.size()));
  for (std::size_t i = 0; i < attached.size(); ++i)
    b.add(static_cast<std::uint32_t>(i)).add(attached[i]);
  return b.finish();
}

} // namespace ttno
