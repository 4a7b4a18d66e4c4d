#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cmc {

using Value = std::int64_t;

enum class LocationId : std::uint32_t {};
enum class EdgeId : std::uint32_t {};

constexpr std::uint32_t raw(LocationId l) { return static_cast<std::uint32_t>(l); }
constexpr std::uint32_t raw(EdgeId e) { return static_cast<std::uint32_t>(e); }

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
  public:
    SyntaxError(const std::string& what, int line, int column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          m_line(line),
          m_column(column) {}

    int line() const { return m_line; }
    int column() const { return m_column; }

  private:
    int m_line;
    int m_column;
};

class InvalidCfa : public Error {
  public:
    using Error::Error;
};

class FormulaTooLarge : public Error {
  public:
    using Error::Error;
};

class AutomatonMismatch : public Error {
  public:
    using Error::Error;
};

} // namespace cmc
