#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace mbk {

// Base class for all library errors.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

class domain_error : public error {
public:
    explicit domain_error(const std::string& msg) : error(msg) {}
};

// Argument coincides with a pole of the evaluated function.
class pole_error : public domain_error {
public:
    pole_error(const std::string& msg, std::complex<double> where)
        : domain_error(msg), location(where) {}
    std::complex<double> location;
};

// Argument lies on the zero lattice -m*tau - n of G(.;tau).
class lattice_zero_error : public domain_error {
public:
    lattice_zero_error(const std::string& msg, std::complex<double> where, int reps)
        : domain_error(msg), location(where), representations(reps) {}
    std::complex<double> location;
    int representations;
};

class singular_system_error : public error {
public:
    explicit singular_system_error(const std::string& msg) : error(msg) {}
};

class convergence_error : public error {
public:
    explicit convergence_error(const std::string& msg) : error(msg) {}
};

// A point of Lambda+ coincides with a point of Lambda-.
class overlap_error : public error {
public:
    explicit overlap_error(const std::string& msg) : error(msg) {}
};

// No separating path with the required pole clearance exists.
class separation_error : public error {
public:
    explicit separation_error(const std::string& msg) : error(msg) {}
};

class inadmissible_error : public error {
public:
    explicit inadmissible_error(const std::string& msg) : error(msg) {}
};

// Case (vii) evaluation at or too close to z = 1.
class unit_argument_error : public domain_error {
public:
    explicit unit_argument_error(const std::string& msg) : domain_error(msg) {}
};

class truncation_error : public error {
public:
    explicit truncation_error(const std::string& msg) : error(msg) {}
};

class higher_order_pole_error : public error {
public:
    explicit higher_order_pole_error(const std::string& msg) : error(msg) {}
};

class strip_error : public domain_error {
public:
    explicit strip_error(const std::string& msg) : domain_error(msg) {}
};

class hypothesis_error : public error {
public:
    explicit hypothesis_error(const std::string& msg) : error(msg) {}
};

class rational_alpha_error : public domain_error {
public:
    explicit rational_alpha_error(const std::string& msg) : domain_error(msg) {}
};

class condition_error : public domain_error {
public:
    explicit condition_error(const std::string& msg) : domain_error(msg) {}
};

} // namespace mbk
