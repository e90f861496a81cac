#include "catamerge/source.hpp"

#include <algorithm>

namespace catamerge {

SourceDocument::SourceDocument(std::string file_name, std::string text)
    : file_name_(std::move(file_name)), text_(std::move(text))
{
    line_starts_.push_back(0);
    for (std::size_t i = 0; i < text_.size(); ++i)
        if (text_[i] == '\n') line_starts_.push_back(i + 1);
}

LineColumn SourceDocument::locate(std::size_t offset) const
{
    offset = std::min(offset, text_.size());
    auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
    std::size_t line = static_cast<std::size_t>(it - line_starts_.begin());
    return {line, offset - line_starts_[line - 1] + 1};
}

Diagnostic make_diagnostic(const SourceDocument &doc, SourceSpan span, std::string message, Severity severity,
                           std::optional<std::string> hint)
{
    auto lc = doc.locate(span.offset);
    return Diagnostic{severity, std::move(message), doc.file_name(), lc.line, lc.column, span.offset, std::move(hint)};
}

std::string format_diagnostic(const Diagnostic &d)
{
    std::string out = d.file + ":" + std::to_string(d.line) + ":" + std::to_string(d.column) + ": " +
                      (d.severity == Severity::Error ? "error: " : "warning: ") + d.message;
    if (d.hint) out += "\n  hint: " + *d.hint;
    return out;
}

bool has_errors(const std::vector<Diagnostic> &diagnostics)
{
    return std::ranges::any_of(diagnostics, [](const Diagnostic &d) { return d.severity == Severity::Error; });
}

} // namespace catamerge
