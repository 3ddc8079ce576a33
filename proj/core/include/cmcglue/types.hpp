#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace cmcglue {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class ErrorKind { Validation, Numerical, IO };

class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

struct ValidationError : Error
{
    explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

struct NumericalError : Error
{
    explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

struct IoError : Error
{
    explicit IoError(const std::string& what) : Error(ErrorKind::IO, what) {}
};

inline constexpr double kPi = 3.14159265358979323846264338327950288;

} // namespace cmcglue
