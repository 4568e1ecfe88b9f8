#include "bhpm/jet.hpp"

#include <sstream>

namespace bhpm {

cplx principal_quarter_root(cplx z) {
    const double re = z.real(), im = z.imag();
    if (im == 0.0 && re <= 0.0) {
        std::ostringstream os;
        os << "quarter root requested on the branch cut at " << re;
        throw Error(ErrorKind::branch_cut, os.str());
    }
    const double r = std::abs(z);
    // (|z| + Re z)^{1/2}; for Re z < 0 use (|z|+Re z) = Im z^2/(|z|-Re z) to avoid cancellation
    const double s = re >= 0.0 ? std::sqrt(r + re) : std::abs(im) / std::sqrt(r - re);
    const double inner = std::sqrt(std::sqrt(r) + s / std::sqrt(2.0));
    const double real_part = inner / std::sqrt(2.0);
    const double imag_part = 0.5 * im / (s * inner);
    return {real_part, imag_part};
}

Jet quarter_root(const Jet& a) {
    return pow_with_value(a, 0.25, principal_quarter_root(a[0]));
}

} // namespace bhpm
