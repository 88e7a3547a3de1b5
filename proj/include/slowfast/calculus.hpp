#pragma once

#include <span>
#include <vector>

#include "slowfast/phase.hpp"

namespace slowfast {

/// Partial gradient of f over coordinates [begin, begin+count) at m.
/// No domain check; used on orbit nodes that may leave the box.
std::vector<double> partial_gradient(const ScalarField& f, std::span<const double> m, int begin,
                                     int count, const DiffEngine& engine = {});

/// Full gradient over all 2r+2k coordinates.
std::vector<double> gradient(const ScalarField& f, std::span<const double> m,
                             const DiffEngine& engine = {});

/// d_0 f: (df/dy_1..df/dy_r, df/dx_1..df/dx_r).
std::vector<double> grad_fast(const SlowFastSystem& sys, const ScalarField& f,
                              const PhasePoint& m, const DiffEngine& engine = {});
/// d_1 f: (df/dp_1..df/dp_k, df/dq_1..df/dq_k).
std::vector<double> grad_slow(const SlowFastSystem& sys, const ScalarField& f,
                              const PhasePoint& m, const DiffEngine& engine = {});

/// Canonical pairing of a (y,x)-ordered or (p,q)-ordered gradient pair:
/// sum_i (a_i b_{n+i} - a_{n+i} b_i).
double symplectic_pairing(std::span<const double> a, std::span<const double> b);

/// Fast bracket {f,g}_0 = sum (f_y g_x - f_x g_y).
double bracket0(const SlowFastSystem& sys, const ScalarField& f, const ScalarField& g,
                const PhasePoint& m, const DiffEngine& engine = {});
/// Slow bracket {f,g}_1 = sum (f_p g_q - f_q g_p).
double bracket1(const SlowFastSystem& sys, const ScalarField& f, const ScalarField& g,
                const PhasePoint& m, const DiffEngine& engine = {});

/// Unchecked variants evaluated on raw coordinates.
double bracket0_at(const Dims& dims, const ScalarField& f, const ScalarField& g,
                   std::span<const double> m, const DiffEngine& engine = {});
double bracket1_at(const Dims& dims, const ScalarField& f, const ScalarField& g,
                   std::span<const double> m, const DiffEngine& engine = {});

/// X_H^(0) = (ydot, xdot) = (-dH/dx, dH/dy); length 2r.
std::vector<double> field_fast(const SlowFastSystem& sys, const PhasePoint& m,
                               const DiffEngine& engine = {});
/// X_H^(1) = (pdot, qdot) = (-dH/dq, dH/dp) without the epsilon factor; length 2k.
std::vector<double> field_slow(const SlowFastSystem& sys, const PhasePoint& m,
                               const DiffEngine& engine = {});
/// X_H^(0) + eps X_H^(1) in the full block layout.
std::vector<double> field_full(const SlowFastSystem& sys, const PhasePoint& m, double eps,
                               const DiffEngine& engine = {});

/// Unchecked full field, used as the right-hand side of trajectory integration.
void field_full_at(const SlowFastSystem& sys, std::span<const double> m, double eps,
                   std::span<double> out, const DiffEngine& engine = {});

}  // namespace slowfast
