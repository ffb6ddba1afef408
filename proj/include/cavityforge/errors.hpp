#ifndef CAVITYFORGE_ERRORS_HPP
#define CAVITYFORGE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cavityforge
{

// Malformed or out-of-contract input (CLI exit code 2).
class InputError : public std::invalid_argument
{
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// Input is well formed but the physics has no answer: unstable resonator,
// no resonance in range, degenerate rates (CLI exit code 3).
class DomainError : public std::runtime_error
{
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace cavityforge

#endif // CAVITYFORGE_ERRORS_HPP
