#include "lipfield/lipschitz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lipfield/errors.hpp"

namespace lipfield {

namespace {

void check_field(const Mesh1D& mesh, std::span<const double> d) {
  if (static_cast<int>(d.size()) != mesh.element_count()) {
    throw InvalidArgument("damage field size " + std::to_string(d.size()) +
                          " does not match element count " +
                          std::to_string(mesh.element_count()));
  }
}

void check_length(double l) {
  if (!(l > 0.0)) throw InvalidArgument("regularization length must be positive");
}

}  // namespace

double lip_constant(const Mesh1D& mesh, std::span<const double> d) {
  check_field(mesh, d);
  double jump = 0.0;
  for (std::size_t i = 1; i < d.size(); ++i) jump = std::max(jump, std::abs(d[i] - d[i - 1]));
  return jump / mesh.element_size();
}

bool is_lip(const Mesh1D& mesh, std::span<const double> d, double l, double tol) {
  check_length(l);
  // A few ulps of slack so fields exactly on the boundary pass at tol = 0.
  constexpr double kRounding = 8.0 * std::numeric_limits<double>::epsilon();
  return lip_constant(mesh, d) <= (1.0 / l) * (1.0 + kRounding) + tol;
}

// Both envelopes are distance transforms with a linear cost: one forward and
// one backward sweep, each clamping the slope to h/l.
DamageField lower_projection(const Mesh1D& mesh, std::span<const double> d, double l) {
  check_field(mesh, d);
  check_length(l);
  const double step = mesh.element_size() / l;
  const int n = mesh.element_count();
  DamageField out(d.begin(), d.end());
  for (int i = 1; i < n; ++i) out[i] = std::min(out[i], out[i - 1] + step);
  for (int i = n - 2; i >= 0; --i) out[i] = std::min(out[i], out[i + 1] + step);
  return out;
}

DamageField upper_projection(const Mesh1D& mesh, std::span<const double> d, double l) {
  check_field(mesh, d);
  check_length(l);
  const double step = mesh.element_size() / l;
  const int n = mesh.element_count();
  DamageField out(d.begin(), d.end());
  for (int i = 1; i < n; ++i) out[i] = std::max(out[i], out[i - 1] - step);
  for (int i = n - 2; i >= 0; --i) out[i] = std::max(out[i], out[i + 1] - step);
  return out;
}

BoundsResult compute_bounds(const Mesh1D& mesh, std::span<const double> d_n,
                            std::span<const double> trial, double l, double tol) {
  check_field(mesh, d_n);
  check_field(mesh, trial);
  // d_n comes out of a previous solve; allow the solver's feasibility slack.
  if (!is_lip(mesh, d_n, l, 1e-8 / mesh.element_size())) {
    throw PreconditionError("previous damage field violates the Lipschitz constraint");
  }
  for (std::size_t i = 0; i < d_n.size(); ++i) {
    if (trial[i] < d_n[i] - tol) {
      throw PreconditionError("trial damage below previous damage at element " +
                              std::to_string(i));
    }
  }

  BoundsResult r;
  r.lower = lower_projection(mesh, trial, l);
  r.upper = upper_projection(mesh, trial, l);
  r.chain_holds = true;
  for (std::size_t i = 0; i < trial.size(); ++i) {
    if (r.upper[i] - r.lower[i] > tol) r.free_elements.push_back(static_cast<int>(i));
    const bool ok = d_n[i] <= r.lower[i] + tol && r.lower[i] <= trial[i] + tol &&
                    trial[i] <= r.upper[i] + tol && r.upper[i] <= 1.0 + tol;
    r.chain_holds = r.chain_holds && ok;
  }
  return r;
}

}  // namespace lipfield
