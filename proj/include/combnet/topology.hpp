#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "combnet/combinatorics.hpp"
#include "combnet/errors.hpp"

namespace combnet {

// The (H, r) combination network: a server behind H relays, with one user per
// r-subset of relays. User k is the k-th r-subset in lexicographic order
// (1-based), which reproduces the usual figure labeling: user 1 <-> {1,2}.
class Topology {
 public:
  Topology(int num_relays, int degree) : H_(num_relays), r_(degree) {
    if (num_relays < 1) throw parameter_error("Topology: need at least one relay");
    if (degree < 1 || degree > num_relays)
      throw parameter_error("Topology: degree must satisfy 1 <= r <= H");
    K_ = binomial(H_, r_);
    user_relays_.reserve(K_);
    relay_users_.assign(H_, {});
    for_each_subset(H_, r_, [&](const Subset& s) {
      const int user = static_cast<int>(user_relays_.size()) + 1;
      user_relays_.push_back(s);
      for (int h : s) relay_users_[h - 1].push_back(user);
    });
    if (K_ <= 64) {
      user_relay_mask_.reserve(K_);
      for (const auto& s : user_relays_) user_relay_mask_.push_back(mask_of(s));
      relay_user_mask_.assign(H_, 0);
      for (int h = 1; h <= H_; ++h)
        for (int k : relay_users_[h - 1]) relay_user_mask_[h - 1] |= std::uint64_t{1} << (k - 1);
    }
  }

  int num_relays() const { return H_; }
  int degree() const { return r_; }
  int num_users() const { return static_cast<int>(K_); }

  // H_k: the r relays user k is wired to.
  const Subset& user_relays(int user) const {
    check_user(user);
    return user_relays_[user - 1];
  }

  // U_h: the C(H-1, r-1) users wired to relay h.
  const Subset& relay_users(int relay) const {
    check_relay(relay);
    return relay_users_[relay - 1];
  }

  bool connected(int relay, int user) const {
    check_user(user);
    check_relay(relay);
    if (!user_relay_mask_.empty())
      return user_relay_mask_[user - 1] >> (relay - 1) & 1;
    const auto& s = user_relays_[user - 1];
    return std::binary_search(s.begin(), s.end(), relay);
  }

  // H_W: union of the relay sets of the users in W.
  Subset relays_of_userset(const Subset& users) const {
    std::uint32_t mask = 0;
    for (int k : users) {
      check_user(k);
      for (int h : user_relays_[k - 1]) mask |= std::uint32_t{1} << (h - 1);
    }
    return subset_of_mask(mask);
  }

  // Bitmask forms; user masks require K <= 64, which covers every network this
  // artifact compiles plans for.
  std::uint32_t relay_mask_of_user(int user) const {
    check_user(user);
    return static_cast<std::uint32_t>(user_relay_mask_.empty()
                                          ? mask_of(user_relays_[user - 1])
                                          : user_relay_mask_[user - 1]);
  }
  std::uint64_t user_mask_of_relay(int relay) const {
    check_relay(relay);
    if (relay_user_mask_.empty())
      throw parameter_error("Topology: user bitmasks need K <= 64 users");
    return relay_user_mask_[relay - 1];
  }

 private:
  void check_user(int user) const {
    if (user < 1 || user > static_cast<int>(K_))
      throw parameter_error("Topology: unknown user id " + std::to_string(user));
  }
  void check_relay(int relay) const {
    if (relay < 1 || relay > H_)
      throw parameter_error("Topology: unknown relay id " + std::to_string(relay));
  }

  int H_;
  int r_;
  std::uint64_t K_;
  std::vector<Subset> user_relays_;
  std::vector<Subset> relay_users_;
  std::vector<std::uint64_t> user_relay_mask_;
  std::vector<std::uint64_t> relay_user_mask_;
};

inline Topology build_topology(int num_relays, int degree) { return Topology(num_relays, degree); }

}  // namespace combnet
