#ifndef YORKL_ERRORS_HPP
#define YORKL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace yorkl {

// Usage and parameter-window errors derive from std::domain_error; the CLI
// maps those to exit status 2. Everything else is a runtime failure.

/// A sampled integrand value was NaN or infinite.
class evaluation_error : public std::runtime_error {
public:
    evaluation_error(const std::string& what, double abscissa)
        : std::runtime_error(what), abscissa_(abscissa) {}
    double abscissa() const noexcept { return abscissa_; }

private:
    double abscissa_;
};

class unbounded_tail_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class frequency_cap_error : public std::domain_error {
    using std::domain_error::domain_error;
};

class order_too_large_error : public std::domain_error {
    using std::domain_error::domain_error;
};

/// Parameters outside the supported (r, t, tau) window.
class window_error : public std::domain_error {
    using std::domain_error::domain_error;
};

/// A truncated series or sum cannot be trusted at the requested cutoff.
class truncation_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class divergence_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class tail_model_error : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

class ring_membership_error : public std::domain_error {
    using std::domain_error::domain_error;
};

/// Raised when exact arithmetic lands somewhere it provably cannot; always a bug.
class consistency_error : public std::logic_error {
    using std::logic_error::logic_error;
};

} // namespace yorkl

#endif // YORKL_ERRORS_HPP
