#pragma once

#include <stdexcept>
#include <string>

namespace timechain {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidBounds : public Error { public: using Error::Error; };
class InvalidPeriod : public Error { public: using Error::Error; };
class NotComposable : public Error { public: using Error::Error; };
class ChannelMismatch : public Error { public: using Error::Error; };
class MalformedNetwork : public Error { public: using Error::Error; };
class EmptyZone : public Error { public: using Error::Error; };
class OverflowError : public Error { public: using Error::Error; };
class UnknownName : public Error { public: using Error::Error; };
class ResourceExhaustedError : public Error { public: using Error::Error; };
class InvalidConfig : public Error { public: using Error::Error; };
class UnsupportedFeature : public Error { public: using Error::Error; };
class ResolutionError : public Error { public: using Error::Error; };

/// Parse failure with source position, for the model file reader.
class ParseError : public Error {
public:
    ParseError(int line, int column, const std::string& message)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                ": " + message),
          line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

} // namespace timechain
