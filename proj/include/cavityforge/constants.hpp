#ifndef CAVITYFORGE_CONSTANTS_HPP
#define CAVITYFORGE_CONSTANTS_HPP

#include <numbers>

namespace cavityforge
{

inline constexpr double kPi = std::numbers::pi;

// SI values (CODATA 2018, exact where the SI fixes them).
struct PhysicalConstants
{
    double c = 299'792'458.0;               // m/s
    double hbar = 1.054'571'817e-34;        // J s
    double eps0 = 8.854'187'8128e-12;       // F/m
    double e_charge = 1.602'176'634e-19;    // C

    // Angular frequency (rad/s) of light with vacuum wavelength lambda_nm.
    double angular_frequency(double lambda_nm) const { return 2.0 * kPi * c / (lambda_nm * 1e-9); }
};

inline constexpr PhysicalConstants kCodata2018{};

// Throws InputError when any override is non-positive or non-finite.
void validate(const PhysicalConstants& constants);

} // namespace cavityforge

#endif // CAVITYFORGE_CONSTANTS_HPP
