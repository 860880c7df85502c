// The pseudotrajectory development Phi^t_{m<-n} and its identities.
#pragma once

#include <functional>
#include <vector>

#include "hsfluct/core.hpp"
#include "hsfluct/pseudo.hpp"

namespace hsfluct {

/// Observable of the m designated survivors (labels 0..m-1, in order).
using SurvivorFunctional = std::function<double(const std::vector<Particle>&)>;

inline constexpr int kMaxAnnihilations = 4;
inline constexpr int kMaxKappaCap = 3;

/// (1/(n-m)!) * sum over signs in {+-1}^{2(n-m)} and budgets in
/// [0, kappa_cap]^n of prod(sbar) * 1{accepted} * h(survivors at t).
/// n is zn.size(). Throws std::invalid_argument above the enumeration caps.
double develop_phi(const SurvivorFunctional& h, int m, const Configuration& zn, double t,
                   int kappa_cap);

/// Phi^t_{m<-n} restricted to a single parameter family; used by the
/// enumeration and by the duality checks.
double phi_term(const SurvivorFunctional& h, const Configuration& zn, const PseudoParams& params,
                double t);

/// Sum over n and ordered families (i_{m+1}, ..., i_n) drawn from the
/// particles outside `roots` of develop_phi(h, m, Z_{(roots, family)}).
double development_sum(const SurvivorFunctional& h, const Configuration& full,
                       const std::vector<int>& roots, double t, int kappa_cap,
                       int max_added = kMaxAnnihilations);

/// Sum over ordered families of the n-m non-root particles of zn (roots are
/// labels 0..m-1) of the direct development Phi^t_{m<-n}[h].
double family_sum_direct(const SurvivorFunctional& h, int m, const Configuration& zn, double t,
                         int kappa_cap);

/// Same family sum for the composed form
/// sum_{n'} Phi^{t'}_{n'<-n}[ Phi^{t-t'}_{m<-n'}[h] ].
double family_sum_composed(const SurvivorFunctional& h, int m, const Configuration& zn, double t,
                           double t_split, int kappa_cap);

}  // namespace hsfluct
