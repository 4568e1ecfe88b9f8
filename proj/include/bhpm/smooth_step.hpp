#pragma once

#include "bhpm/jet.hpp"

namespace bhpm {

// C-infinity step: 0 for t <= 0, 1 for t >= 1, phi(t)/(phi(t)+phi(1-t)) in between
// with phi(t) = exp(-1/t).
template <class S>
BasicJet<S> smooth_step(const BasicJet<S>& t) {
    const double t0 = std::real(t[0]);
    if (t0 <= 0.0) return BasicJet<S>::zero(t.base(), t.order());
    if (t0 >= 1.0) return BasicJet<S>::one(t.base(), t.order());
    BasicJet<S> u = BasicJet<S>::one(t.base(), t.order()) - t;
    BasicJet<S> a = exp(-recip(t));
    BasicJet<S> b = exp(-recip(u));
    return a * recip(a + b);
}

} // namespace bhpm
