#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace catamerge {

/// Byte range into a SourceDocument. A default span means "no location".
struct SourceSpan
{
    std::size_t offset = 0;
    std::size_t length = 0;

    friend bool operator==(const SourceSpan &, const SourceSpan &) = default;
};

struct LineColumn
{
    std::size_t line = 1; // 1-based
    std::size_t column = 1; // 1-based, in bytes
};

class SourceDocument
{
  public:
    SourceDocument(std::string file_name, std::string text);

    const std::string &file_name() const { return file_name_; }
    const std::string &text() const { return text_; }

    /// Offsets past the end clamp to the last position.
    LineColumn locate(std::size_t offset) const;

  private:
    std::string file_name_;
    std::string text_;
    std::vector<std::size_t> line_starts_;
};

enum class Severity { Error, Warning };

struct Diagnostic
{
    Severity severity = Severity::Error;
    std::string message;
    std::string file;
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t offset = 0;
    std::optional<std::string> hint;
};

Diagnostic make_diagnostic(const SourceDocument &doc, SourceSpan span, std::string message,
                           Severity severity = Severity::Error, std::optional<std::string> hint = std::nullopt);

/// `file:line:column: error: message` followed by an optional hint line.
std::string format_diagnostic(const Diagnostic &d);

bool has_errors(const std::vector<Diagnostic> &diagnostics);

} // namespace catamerge
