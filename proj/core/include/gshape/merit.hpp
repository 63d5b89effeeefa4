#pragma once

#include "gshape/greens.hpp"

namespace gshape {

/// Point dipole with a unit-norm complex in-plane moment.
struct DipoleSpec {
  Vec2 position;
  CVec2 moment{Complex{1.0}, Complex{0.0}};

  /// Normalizes the moment; throws InvalidArgument for a zero moment.
  static DipoleSpec make(Vec2 position, CVec2 moment);
};

struct MeritReport {
  double gamma = 0.0;
  double gamma0 = 0.0;
  double q = 0.0;
};

/// |conj(d_A) . G_AD . d_D|^2 with all positive prefactors set to 1.
double ret_rate(const Mat2& g_ad, const DipoleSpec& acceptor, const DipoleSpec& donor);

/// Gamma / Gamma0. Throws InvalidArgument unless freespace_gamma > 0.
double purcell_q(double geometry_gamma, double freespace_gamma);

/// Per-cell adjoint speed for the transfer rate,
///   v(r') = Re{ p * [G(r', r_A) conj(d_A)] . [G(r', r_D) d_D] },
///   p = conj(conj(d_A) . G_AD . d_D),
/// where `acceptor_column` is the field of a source conj(d_A) at r_A and
/// `donor_column` the field of d_D at r_D. The cell dot product is taken
/// edge by edge, which makes v the exact derivative of Gamma with respect to
/// a uniform permittivity increase of the cell (up to a positive factor).
CellField velocity_field_ret(const GreensColumn& acceptor_column,
                             const GreensColumn& donor_column, const Mat2& g_ad,
                             const DipoleSpec& acceptor, const DipoleSpec& donor, double omega);

/// step * sum over contour of v^2 dl: first-order predicted merit increase.
double predicted_gain(const VelocityField& v, const LevelSetField& phi, double step);

/// A merit that is a real functional of G between two fixed points, with an
/// adjoint velocity computed from the columns radiated at those points.
class GreensMerit {
 public:
  virtual ~GreensMerit() = default;

  /// Source moments to simulate at the first and second point.
  virtual CVec2 adjoint_moment() const = 0;
  virtual CVec2 forward_moment() const = 0;
  virtual Vec2 adjoint_point() const = 0;
  virtual Vec2 forward_point() const = 0;

  /// Merit from G(adjoint_point, forward_point).
  virtual double value(const Mat2& g) const = 0;

  virtual CellField velocity(const GreensColumn& adjoint, const GreensColumn& forward,
                             const Mat2& g) const = 0;
};

/// Resonance energy transfer rate between an acceptor and a donor.
class RetMerit final : public GreensMerit {
 public:
  RetMerit(DipoleSpec acceptor, DipoleSpec donor, double omega)
      : acceptor_(acceptor), donor_(donor), omega_(omega) {}

  CVec2 adjoint_moment() const override;
  CVec2 forward_moment() const override { return donor_.moment; }
  Vec2 adjoint_point() const override { return acceptor_.position; }
  Vec2 forward_point() const override { return donor_.position; }
  double value(const Mat2& g) const override { return ret_rate(g, acceptor_, donor_); }
  CellField velocity(const GreensColumn& adjoint, const GreensColumn& forward,
                     const Mat2& g) const override {
    return velocity_field_ret(adjoint, forward, g, acceptor_, donor_, omega_);
  }

 private:
  DipoleSpec acceptor_;
  DipoleSpec donor_;
  double omega_;
};

}  // namespace gshape
