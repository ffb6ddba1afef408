#include "cavityforge/constants.hpp"

#include <cmath>

#include "cavityforge/errors.hpp"

namespace cavityforge
{

void validate(const PhysicalConstants& k)
{
    for (double v : {k.c, k.hbar, k.eps0, k.e_charge}) {
        if (!std::isfinite(v) || v <= 0.0) {
            throw InputError("physical constants must be positive and finite");
        }
    }
}

} // namespace cavityforge
