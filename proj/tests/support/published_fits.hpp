#pragma once

// Published per-year parameters and Gini coefficients for Turkish individual
// income, 2002-2019 (normalized to unit mean income).

#include <array>
#include <stdexcept>
#include <string>

#include "gpcycle/gpd.hpp"

namespace gpcycle::testing {

struct PublishedFit {
  int year;
  double x_t;
  double eta;
  double b;
  double alpha;
  double gini_raw;
  double gini;

  GpdParams params() const { return GpdParams::make(x_t, eta, b, alpha); }
};

inline constexpr std::array<PublishedFit, 18> kPublishedFits = {{
    {2002, 2.135, 2.491, 0.358, 1.598, 0.505, 0.533},
    {2003, 1.446, 0.604, 1.006, 1.809, 0.462, 0.485},
    {2004, 1.432, 0.691, 0.909, 1.938, 0.469, 0.481},
    {2005, 1.722, 1.169, 0.610, 2.075, 0.473, 0.479},
    {2006, 1.754, 1.381, 0.537, 2.103, 0.483, 0.485},
    {2007, 2.048, 1.939, 0.406, 2.172, 0.490, 0.484},
    {2008, 1.796, 1.561, 0.493, 2.049, 0.490, 0.492},
    {2009, 2.072, 2.921, 0.299, 2.112, 0.509, 0.502},
    {2010, 2.041, 2.372, 0.350, 2.183, 0.497, 0.492},
    {2011, 1.936, 2.136, 0.386, 2.085, 0.499, 0.497},
    {2012, 1.936, 1.738, 0.452, 2.122, 0.487, 0.485},
    {2013, 2.109, 2.146, 0.380, 2.110, 0.491, 0.488},
    {2014, 2.062, 1.955, 0.408, 2.112, 0.485, 0.486},
    {2015, 1.849, 1.369, 0.541, 2.131, 0.477, 0.476},
    {2016, 1.921, 1.185, 0.586, 2.188, 0.459, 0.462},
    {2017, 1.913, 1.001, 0.661, 2.134, 0.456, 0.455},
    {2018, 1.705, 0.770, 0.813, 1.998, 0.456, 0.460},
    {2019, 1.787, 0.919, 0.703, 2.256, 0.449, 0.451},
}};

inline const PublishedFit& published_fit(int year) {
  for (const auto& r : kPublishedFits) {
    if (r.year == year) return r;
  }
  throw std::out_of_range("no published fit for year " + std::to_string(year));
}

}  // namespace gpcycle::testing
