#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace holos {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr double kSpeedOfLight = 299792458.0;          // [m/s]
inline constexpr double kFreeSpaceImpedance = 376.730313668;  // [ohm]
inline constexpr double kPi = 3.14159265358979323846264338327950288;

using cplx = std::complex<double>;

enum class Axis : int { X = 0, Y = 1, Z = 2 };

const char* axis_name(Axis a);
Axis axis_from_name(const std::string& s);

struct Vec3 {
  double x = 0, y = 0, z = 0;

  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }
};

// Local surface coordinates (u along the first side, v along the second).
struct Uv {
  double u = 0, v = 0;
};

struct SingularGeometryError : std::domain_error {
  explicit SingularGeometryError(const std::string& msg) : std::domain_error(msg) {}
};

struct UnsupportedPoseError : std::domain_error {
  explicit UnsupportedPoseError(const std::string& msg) : std::domain_error(msg) {}
};

struct AssemblyError : std::runtime_error {
  explicit AssemblyError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Chunked parallel loop over [0, n). Bodies must be independent; falls back to
// a plain loop when the machine has a single hardware thread or n is small.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace holos
