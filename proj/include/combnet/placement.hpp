#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "combnet/combinatorics.hpp"
#include "combnet/errors.hpp"
#include "combnet/rational.hpp"
#include "combnet/symbol.hpp"
#include "combnet/topology.hpp"

namespace combnet {

// One of the C(K,t) equal pieces of a file: F_{file, holders}.
struct SubfileId {
  int file = 0;                    // 1-based file index
  std::uint64_t holder_rank = 0;   // lex rank of the t-subset of holders

  bool operator==(const SubfileId&) const = default;
};

struct DemandVector {
  std::vector<int> d;  // d[k-1] in [1..N]
};

inline DemandVector worst_case_demand(int num_users, int num_files) {
  DemandVector dv;
  dv.d.reserve(num_users);
  for (int k = 1; k <= num_users; ++k) dv.d.push_back((k - 1) % num_files + 1);
  return dv;
}

// Symmetric uncoded placement: each file is split into C(K,t) subfiles and
// subfile F_{i,W} is cached exactly by the users in W, giving M = tN/K.
class Placement {
 public:
  Placement(int num_users, int num_files, int t)
      : K_(num_users), N_(num_files), t_(t) {
    if (N_ < 1) throw parameter_error("Placement: need at least one file");
    if (t < 0 || t > K_) throw parameter_error("Placement: t must be in [0..K]");
    num_subfiles_ = binomial(K_, t_);
    subfile_len_ = Rational(1, BigInt(num_subfiles_));
  }

  int num_users() const { return K_; }
  int num_files() const { return N_; }
  int t() const { return t_; }
  std::uint64_t subfiles_per_file() const { return num_subfiles_; }
  const Rational& subfile_len() const { return subfile_len_; }

  Rational cache_size_files() const { return Rational(BigInt(t_) * N_, BigInt(K_)); }

  Subset holders(const SubfileId& sf) const { return unrank_subset(sf.holder_rank, K_, t_); }

  bool caches(int user, const SubfileId& sf) const {
    check_user(user);
    check_subfile(sf);
    const Subset w = holders(sf);
    return std::binary_search(w.begin(), w.end(), user);
  }

  // Explicit cache content of one user, N * C(K-1, t-1) subfile ids in
  // (file, holder-rank) order. Intended for inspection at small scale; the
  // simulator queries caches() instead.
  std::vector<SubfileId> cache_list(int user) const {
    check_user(user);
    std::vector<SubfileId> out;
    for (int i = 1; i <= N_; ++i) {
      std::uint64_t w = 0;
      for_each_subset(K_, t_, [&](const Subset& s) {
        if (std::binary_search(s.begin(), s.end(), user)) out.push_back({i, w});
        ++w;
      });
    }
    return out;
  }

  void check_demand(const DemandVector& dv) const {
    if (static_cast<int>(dv.d.size()) != K_)
      throw parameter_error("DemandVector: expected one entry per user");
    for (int x : dv.d)
      if (x < 1 || x > N_) throw parameter_error("DemandVector: file index out of range");
  }

 private:
  void check_user(int user) const {
    if (user < 1 || user > K_) throw parameter_error("Placement: unknown user id");
  }
  void check_subfile(const SubfileId& sf) const {
    if (sf.file < 1 || sf.file > N_ || sf.holder_rank >= num_subfiles_)
      throw parameter_error("Placement: subfile id out of range");
  }

  int K_;
  int N_;
  int t_;
  std::uint64_t num_subfiles_;
  Rational subfile_len_;
};

inline Placement uncoded_placement(const Topology& topo, int num_files, int t) {
  return Placement(topo.num_users(), num_files, t);
}

// W_J for one (t+1)-subset J: the XOR of the t+1 subfiles F_{d_j, J\{j}}.
struct MulticastMessage {
  Subset J;
  std::uint64_t j_rank = 0;          // lex rank of J among (t+1)-subsets
  std::vector<SubfileId> parts;      // one per j in J, in J order
  Rational length;                   // 1/C(K,t) of a file
};

inline MulticastMessage make_multicast_message(const Placement& pl, const DemandVector& dv,
                                               const Subset& J, std::uint64_t j_rank) {
  MulticastMessage msg;
  msg.J = J;
  msg.j_rank = j_rank;
  msg.length = pl.subfile_len();
  msg.parts.reserve(J.size());
  for (std::size_t i = 0; i < J.size(); ++i) {
    Subset holders;
    holders.reserve(J.size() - 1);
    for (std::size_t j = 0; j < J.size(); ++j)
      if (j != i) holders.push_back(J[j]);
    msg.parts.push_back({dv.d[J[i] - 1], rank_subset(holders, pl.num_users())});
  }
  return msg;
}

// Visits the C(K, t+1) multicast messages in lexicographic J order.
template <typename Fn>
void visit_multicast_messages(const Placement& pl, const DemandVector& dv, Fn&& fn) {
  pl.check_demand(dv);
  std::uint64_t j_rank = 0;
  for_each_subset(pl.num_users(), pl.t() + 1, [&](const Subset& J) {
    fn(make_multicast_message(pl, dv, J, j_rank));
    ++j_rank;
  });
}

inline std::vector<MulticastMessage> generate_multicast_messages(const Placement& pl,
                                                                 const DemandVector& dv) {
  std::vector<MulticastMessage> out;
  out.reserve(binomial(pl.num_users(), pl.t() + 1));
  visit_multicast_messages(pl, dv, [&](MulticastMessage m) { out.push_back(std::move(m)); });
  return out;
}

// Global packet basis: coordinate of packet p of subfile (file, holder_rank)
// when every subfile carries s packets.
struct BasisLayout {
  std::uint64_t subfiles_per_file = 0;
  int packets_per_subfile = 0;
  int num_files = 0;

  Coord coord(const SubfileId& sf, int packet) const {
    return (static_cast<Coord>(sf.file - 1) * subfiles_per_file + sf.holder_rank) *
               packets_per_subfile +
           packet;
  }
  Coord dimension() const {
    return static_cast<Coord>(num_files) * subfiles_per_file * packets_per_subfile;
  }
  SubfileId subfile_of(Coord c) const {
    const std::uint64_t sf = c / packets_per_subfile;
    return {static_cast<int>(sf / subfiles_per_file) + 1, sf % subfiles_per_file};
  }
  int packet_of(Coord c) const { return static_cast<int>(c % packets_per_subfile); }
};

// Packet `pos` of message W_J as a symbol vector: the GF(2)-embedded XOR of
// packet `pos` of each constituent subfile.
inline SymbolVector message_packet(const BasisLayout& layout, const MulticastMessage& msg,
                                   int pos) {
  SymbolVector v;
  for (const SubfileId& part : msg.parts) v.add_term(layout.coord(part, pos), 1);
  return v;
}

}  // namespace combnet
