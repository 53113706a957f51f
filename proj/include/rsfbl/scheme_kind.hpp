#pragma once

#include <stdexcept>
#include <string>

namespace rsfbl {

// Which streams of the one-common-plus-private layout a transmission scheme
// actually uses.
//
//  - IncompleteRsma: common stream plus one private stream per user.  The
//    common rate is split into per-user shares.
//  - Sdma: private streams only; the common stream is switched off.
//  - Noma: two users, fully ordered.  The stronger decoding chain carries one
//    user's entire message on the common stream; that user transmits no
//    private stream and the other user takes no common share.
class SchemeKind {
 public:
  enum class Family { IncompleteRsma, Sdma, Noma };

  static SchemeKind incomplete_rsma() { return SchemeKind(Family::IncompleteRsma, -1, -1); }
  static SchemeKind sdma() { return SchemeKind(Family::Sdma, -1, -1); }

  // NOMA order: `common_user` sends its message on the common stream (decoded
  // by both), `private_user` keeps a private stream.  Two-user only.
  static SchemeKind noma(int common_user, int private_user) {
    if (common_user < 0 || private_user < 0 || common_user == private_user) {
      throw std::invalid_argument("noma: users must be distinct and non-negative");
    }
    return SchemeKind(Family::Noma, common_user, private_user);
  }

  Family family() const { return family_; }
  bool is_rsma() const { return family_ == Family::IncompleteRsma; }
  bool is_sdma() const { return family_ == Family::Sdma; }
  bool is_noma() const { return family_ == Family::Noma; }

  int noma_common_user() const {
    require_noma();
    return common_user_;
  }
  int noma_private_user() const {
    require_noma();
    return private_user_;
  }

  // True when the scheme transmits a common stream at all.
  bool uses_common_stream() const { return family_ != Family::Sdma; }

  // True when user k transmits a private stream under this scheme.
  bool private_stream_active(int k) const {
    return !(family_ == Family::Noma && k == common_user_);
  }

  // True when user k may take a nonzero share of the common rate.
  bool common_share_active(int k) const {
    if (family_ == Family::Sdma) return false;
    if (family_ == Family::Noma) return k == common_user_;
    return true;
  }

  // Checks the scheme makes sense for a K-user problem.
  void check_num_users(int num_users) const {
    if (family_ == Family::Noma) {
      if (num_users != 2) {
        throw std::domain_error("NOMA ordering is defined for exactly two users");
      }
      if (common_user_ >= num_users || private_user_ >= num_users) {
        throw std::domain_error("NOMA user index out of range");
      }
    }
  }

  std::string label() const {
    switch (family_) {
      case Family::IncompleteRsma: return "rsma";
      case Family::Sdma: return "sdma";
      case Family::Noma:
        return "noma_c" + std::to_string(common_user_) + "_p" +
               std::to_string(private_user_);
    }
    return "unknown";
  }

  // Experiment-facing group name; both NOMA orders report as "noma".
  std::string family_label() const {
    switch (family_) {
      case Family::IncompleteRsma: return "rsma";
      case Family::Sdma: return "sdma";
      case Family::Noma: return "noma";
    }
    return "unknown";
  }

  friend bool operator==(const SchemeKind& a, const SchemeKind& b) {
    return a.family_ == b.family_ && a.common_user_ == b.common_user_ &&
           a.private_user_ == b.private_user_;
  }

 private:
  SchemeKind(Family f, int cu, int pu)
      : family_(f), common_user_(cu), private_user_(pu) {}
  void require_noma() const {
    if (family_ != Family::Noma) {
      throw std::logic_error("not a NOMA scheme");
    }
  }

  Family family_;
  int common_user_;
  int private_user_;
};

}  // namespace rsfbl
