#pragma once

// The forms fed to the current in the middle-degree slicing argument, written
// once over any coefficient ring so the symbolic engine and the coordinate
// model build them through the same definitions.

#include <string>

#include "heis/calculus.hpp"
#include "heis/form.hpp"

namespace heis {

template <class Coeff, class Frame>
struct SlicingInputs {
  using F = Form<Coeff>;
  const Calculus<Coeff, Frame>& calc;
  Coeff g;
  F omega;

  F g0() const { return calc.scalar(g); }
  F dg() const { return calc.d(g0()); }
};

// script_L(g w) - g script_L(w).
template <class Coeff, class Frame>
Form<Coeff> leibniz_defect(const Calculus<Coeff, Frame>& calc, const Coeff& g,
                           const Form<Coeff>& omega) {
  return calc.script_L(g * omega) - g * calc.script_L(omega);
}

// L^{-1}(-(dg ^ w) restricted to horizontal forms).
template <class Coeff, class Frame>
Form<Coeff> leibniz_defect_formula(const Calculus<Coeff, Frame>& calc, const Coeff& g,
                                   const Form<Coeff>& omega) {
  const auto dg = calc.d(calc.scalar(g));
  return calc.L_inv(-horizontal_part(wedge(dg, omega)));
}

// dg ^ (w + script_L(w) ^ theta) + d((script_L(g w) - g script_L(w)) ^ theta).
// sign_of_correction = -1 builds the corrupted variant used as a mutation.
template <class Coeff, class Frame>
Form<Coeff> slicing_expression(const Calculus<Coeff, Frame>& calc, const Coeff& g,
                               const Form<Coeff>& omega, int sign_of_correction = 1) {
  const auto theta = calc.theta();
  const auto dg = calc.d(calc.scalar(g));
  const auto first = wedge(dg, omega + wedge(calc.script_L(omega), theta));
  const auto second = calc.d(wedge(leibniz_defect(calc, g, omega), theta));
  return sign_of_correction > 0 ? first + second : first - second;
}

// (dg ^ w) restricted to theta-carrying monomials, plus
// (d script_L(g w) - g d script_L(w)) ^ theta.
template <class Coeff, class Frame>
Form<Coeff> vertical_split(const Calculus<Coeff, Frame>& calc, const Coeff& g,
                           const Form<Coeff>& omega) {
  const auto dg = calc.d(calc.scalar(g));
  const auto dsl_g = calc.d(calc.script_L(g * omega));
  const auto dsl = calc.d(calc.script_L(omega));
  return vertical_part(wedge(dg, omega)) + wedge(dsl_g - g * dsl, calc.theta());
}

// [ -T(g) w' - d L^{-1}(h(dg ^ w')) - dg ^ L^{-1}(h(dw')) ] ^ theta, where
// w = w' + beta ^ theta and h() keeps the horizontal part.
template <class Coeff, class Frame>
Form<Coeff> theta_normal_form(const Calculus<Coeff, Frame>& calc, const Coeff& g,
                              const Form<Coeff>& omega) {
  const int n = calc.n();
  const auto split = decompose_theta(omega);
  const auto& wp = split.horizontal;
  const auto dg = calc.d(calc.scalar(g));
  const Coeff tg = calc.frame_derivative(2 * n + 1, g);
  auto bracket = -(tg * wp);
  bracket -= calc.d(calc.L_inv(horizontal_part(wedge(dg, wp))));
  bracket -= wedge(dg, calc.L_inv(horizontal_part(calc.d(wp))));
  return wedge(bracket, calc.theta());
}

// n = 1, w = w1 dx + w2 dy: the dx^theta and dy^theta coefficients of the
// slicing expression written out in frame derivatives,
//   -T(g) w1 + X(A) + B X(g)   and   -T(g) w2 + Y(A) + B Y(g)
// with A = X(g) w2 - Y(g) w1 and B = X(w2) - Y(w1).
template <class Coeff, class Frame>
Form<Coeff> h1_coefficient_form(const Calculus<Coeff, Frame>& calc, const Coeff& g,
                                const Coeff& w1, const Coeff& w2) {
  const auto W = [&](int j, const Coeff& c) { return calc.frame_derivative(j, c); };
  const Coeff a = W(1, g) * w2 - W(2, g) * w1;
  const Coeff b = W(1, w2) - W(2, w1);
  const Coeff cx = -(W(3, g) * w1) + W(1, a) + b * W(1, g);
  const Coeff cy = -(W(3, g) * w2) + W(2, a) + b * W(2, g);
  Form<Coeff> out(1, 2);
  out.add_term(bit_of(1) | bit_of(3), cx);
  out.add_term(bit_of(2) | bit_of(3), cy);
  return out;
}

}  // namespace heis
