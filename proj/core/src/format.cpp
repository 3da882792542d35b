#include "aiready/format.hpp"

#include <array>
#include <utility>

#include "aiready/delimited.hpp"
#include "aiready/text.hpp"

namespace aiready {
namespace {

constexpr std::array<std::pair<FormatId, std::string_view>, 19> kFormatNames{{
    {FormatId::csv, "csv"},       {FormatId::tsv, "tsv"},       {FormatId::json, "json"},
    {FormatId::jsonl, "jsonl"},   {FormatId::parquet, "parquet"}, {FormatId::hdf5, "hdf5"},
    {FormatId::fits, "fits"},     {FormatId::netcdf, "netcdf"}, {FormatId::png, "png"},
    {FormatId::jpeg, "jpeg"},     {FormatId::tiff, "tiff"},     {FormatId::gif, "gif"},
    {FormatId::txt, "txt"},       {FormatId::md, "md"},         {FormatId::yaml, "yaml"},
    {FormatId::zip, "zip"},       {FormatId::gzip, "gzip"},     {FormatId::pdf, "pdf"},
    {FormatId::unknown, "unknown"},
}};

bool starts_with_bytes(std::string_view head, std::string_view sig) {
  return head.size() >= sig.size() && head.substr(0, sig.size()) == sig;
}

using namespace std::string_view_literals;

std::optional<FormatId> detect_magic(std::string_view head, std::optional<FormatId> ext) {
  if (starts_with_bytes(head, "\x89PNG\r\n\x1a\n"sv)) return FormatId::png;
  if (starts_with_bytes(head, "\xFF\xD8\xFF"sv)) return FormatId::jpeg;
  if (starts_with_bytes(head, "GIF87a"sv) || starts_with_bytes(head, "GIF89a"sv)) return FormatId::gif;
  if (starts_with_bytes(head, "II*\0"sv) || starts_with_bytes(head, "MM\0*"sv)) return FormatId::tiff;
  if (starts_with_bytes(head, "%PDF-"sv)) return FormatId::pdf;
  if (starts_with_bytes(head, "PAR1"sv)) return FormatId::parquet;
  if (starts_with_bytes(head, "PK\x03\x04"sv) || starts_with_bytes(head, "PK\x05\x06"sv)) return FormatId::zip;
  if (starts_with_bytes(head, "\x1F\x8B"sv)) return FormatId::gzip;
  if (starts_with_bytes(head, "\x89HDF\r\n\x1a\n"sv)) {
    // netCDF-4 files are HDF5 containers.
    return ext == FormatId::netcdf ? FormatId::netcdf : FormatId::hdf5;
  }
  if (starts_with_bytes(head, "CDF\x01"sv) || starts_with_bytes(head, "CDF\x02"sv)) return FormatId::netcdf;
  if (starts_with_bytes(head, "SIMPLE  ="sv)) return FormatId::fits;
  return std::nullopt;
}

std::optional<FormatId> sniff_content(std::string_view head) {
  if (head.empty()) return std::nullopt;
  if (head.find('\0') != std::string_view::npos || !text::valid_utf8(head)) return std::nullopt;
  // Control bytes other than whitespace mean binary, even when the bytes
  // happen to be valid UTF-8.
  std::size_t control = 0;
  for (unsigned char c : head) {
    if (c < 0x20 && c != '\t' && c != '\n' && c != '\r' && c != '\f') ++control;
  }
  if (control * 20 > head.size()) return std::nullopt;
  std::string_view t = text::trim(head);
  if (t.empty()) return FormatId::txt;
  auto lines = text::split_lines(t);
  if (t.front() == '{') {
    std::size_t object_lines = 0;
    for (auto line : lines) {
      auto l = text::trim(line);
      if (!l.empty() && l.front() == '{' && l.back() == '}') ++object_lines;
    }
    return object_lines >= 2 ? FormatId::jsonl : FormatId::json;
  }
  if (t.front() == '[') return FormatId::json;
  if (lines.size() >= 2) {
    char d = sniff_delimiter(head, '\0');
    if (d == ',') return FormatId::csv;
    if (d == '\t') return FormatId::tsv;
  }
  return FormatId::txt;
}

}  // namespace

std::string_view to_string(FormatId id) {
  for (auto [f, name] : kFormatNames) {
    if (f == id) return name;
  }
  return "unknown";
}

std::string_view to_string(Confidence c) {
  switch (c) {
    case Confidence::magic: return "magic";
    case Confidence::extension: return "extension";
    case Confidence::content_sniff: return "content_sniff";
  }
  return "extension";
}

std::optional<FormatId> format_from_string(std::string_view s) {
  for (auto [f, name] : kFormatNames) {
    if (name == s) return f;
  }
  return std::nullopt;
}

std::optional<Confidence> confidence_from_string(std::string_view s) {
  if (s == "magic") return Confidence::magic;
  if (s == "extension") return Confidence::extension;
  if (s == "content_sniff") return Confidence::content_sniff;
  return std::nullopt;
}

FormatFamily family_of(FormatId id) {
  switch (id) {
    case FormatId::csv:
    case FormatId::tsv:
    case FormatId::json:
    case FormatId::jsonl:
    case FormatId::parquet:
    case FormatId::hdf5:
    case FormatId::netcdf: return FormatFamily::tabular;
    case FormatId::png:
    case FormatId::jpeg:
    case FormatId::tiff:
    case FormatId::gif:
    case FormatId::fits: return FormatFamily::image;
    case FormatId::txt:
    case FormatId::md: return FormatFamily::sequence_text;
    default: return FormatFamily::other;
  }
}

bool is_probeable_tabular(FormatId id) {
  return id == FormatId::csv || id == FormatId::tsv || id == FormatId::json || id == FormatId::jsonl;
}

bool is_text_format(FormatId id) {
  switch (id) {
    case FormatId::csv:
    case FormatId::tsv:
    case FormatId::json:
    case FormatId::jsonl:
    case FormatId::txt:
    case FormatId::md:
    case FormatId::yaml: return true;
    default: return false;
  }
}

bool is_ml_loadable(FormatId id) {
  switch (id) {
    case FormatId::csv:
    case FormatId::tsv:
    case FormatId::json:
    case FormatId::jsonl:
    case FormatId::parquet:
    case FormatId::hdf5:
    case FormatId::netcdf:
    case FormatId::fits:
    case FormatId::png:
    case FormatId::jpeg:
    case FormatId::tiff:
    case FormatId::gif: return true;
    default: return false;
  }
}

std::optional<FormatId> format_from_extension(std::string_view extension) {
  std::string ext = text::to_lower(extension);
  if (!ext.empty() && ext.front() == '.') ext.erase(0, 1);
  if (ext == "csv") return FormatId::csv;
  if (ext == "tsv" || ext == "tab") return FormatId::tsv;
  if (ext == "json" || ext == "geojson") return FormatId::json;
  if (ext == "jsonl" || ext == "ndjson") return FormatId::jsonl;
  if (ext == "parquet" || ext == "pq") return FormatId::parquet;
  if (ext == "h5" || ext == "hdf5" || ext == "he5" || ext == "hdf") return FormatId::hdf5;
  if (ext == "fits" || ext == "fit" || ext == "fts") return FormatId::fits;
  if (ext == "nc" || ext == "nc4" || ext == "cdf" || ext == "netcdf") return FormatId::netcdf;
  if (ext == "png") return FormatId::png;
  if (ext == "jpg" || ext == "jpeg") return FormatId::jpeg;
  if (ext == "tif" || ext == "tiff") return FormatId::tiff;
  if (ext == "gif") return FormatId::gif;
  if (ext == "txt" || ext == "text") return FormatId::txt;
  if (ext == "md" || ext == "markdown") return FormatId::md;
  if (ext == "yaml" || ext == "yml") return FormatId::yaml;
  if (ext == "zip") return FormatId::zip;
  if (ext == "gz" || ext == "tgz") return FormatId::gzip;
  if (ext == "pdf") return FormatId::pdf;
  return std::nullopt;
}

FormatGuess detect_format(std::string_view head_bytes, std::string_view extension) {
  auto ext = format_from_extension(extension);
  if (auto magic = detect_magic(head_bytes, ext)) return {*magic, Confidence::magic};
  if (ext) return {*ext, Confidence::extension};
  if (auto sniffed = sniff_content(head_bytes)) return {*sniffed, Confidence::content_sniff};
  return {FormatId::unknown, Confidence::content_sniff};
}

}  // namespace aiready
