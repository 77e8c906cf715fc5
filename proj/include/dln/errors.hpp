#pragma once

#include <stdexcept>
#include <string>

namespace dln {

// Common base for all domain errors. The CLI surfaces name() verbatim and
// maps any DlnError to exit code 1.
class DlnError : public std::runtime_error {
public:
  DlnError(std::string name, const std::string& what)
      : std::runtime_error(what), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

class NonFinite : public DlnError {
public:
  explicit NonFinite(const std::string& what) : DlnError("NonFinite", what) {}
};

class ShapeMismatch : public DlnError {
public:
  explicit ShapeMismatch(const std::string& what) : DlnError("ShapeMismatch", what) {}
};

class RankDeficient : public DlnError {
public:
  explicit RankDeficient(const std::string& what) : DlnError("RankDeficient", what) {}
};

class CoincidentSingularValues : public DlnError {
public:
  explicit CoincidentSingularValues(const std::string& what)
      : DlnError("CoincidentSingularValues", what) {}
};

class NotBalanced : public DlnError {
public:
  explicit NotBalanced(const std::string& what) : DlnError("NotBalanced", what) {}
};

class UnsupportedDimension : public DlnError {
public:
  explicit UnsupportedDimension(const std::string& what)
      : DlnError("UnsupportedDimension", what) {}
};

class IndexError : public DlnError {
public:
  explicit IndexError(const std::string& what) : DlnError("IndexError", what) {}
};

class IoError : public DlnError {
public:
  explicit IoError(const std::string& what) : DlnError("IoError", what) {}
};

}  // namespace dln
