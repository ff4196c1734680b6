#pragma once

// Scalar conversion traits shared by the double, Interval and multiprecision
// instantiations of the model.
//
//   decimal<T>(x)  the decimal number printed as x (0.89 means 89/100)
//   exact<T>(x)    the binary value of x itself

#include <cmath>

#include "certibif/interval.hpp"

namespace certibif {

template <class T>
struct ScalarTraits {
  static T decimal(double x) { return T(x); }
  static T exact(double x) { return T(x); }
  static double to_double(const T& x) { return static_cast<double>(x); }
};

template <>
struct ScalarTraits<Interval> {
  static Interval decimal(double x) { return Interval::decimal(x); }
  static Interval exact(double x) { return Interval(x); }
  static double to_double(const Interval& x) { return x.mid(); }
};

template <class T>
T decimal(double x) {
  return ScalarTraits<T>::decimal(x);
}

template <class T>
T exact(double x) {
  return ScalarTraits<T>::exact(x);
}

template <class T>
double to_double(const T& x) {
  return ScalarTraits<T>::to_double(x);
}

}  // namespace certibif
