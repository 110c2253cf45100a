#pragma once

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lblab/errors.hpp"
#include "lblab/history.hpp"
#include "lblab/io_util.hpp"

namespace lblab {

// Prediction-history file format "lblog/1".
//
// Line-oriented and append-friendly: a training process can emit one record
// after every epoch. All tokens are space-separated; sample ids are
// percent-encoded so arbitrary ids survive. Runs and epochs are 1-based.
//
//   lblog/1
//   dims <n_samples> <n_epochs> <n_runs>
//   ids <id_1> ... <id_N>
//   config <free-form one-line description>
//   rec <run> <epoch> <p_1> ... <p_N>     (records in run-major epoch order)
//
// Probabilities are written with round-trip precision, so rewriting an
// identical experiment reproduces the file byte for byte.

inline constexpr std::string_view kHistoryFormatTag = "lblog/1";

struct HistoryFile {
  PredictionHistory history;
  std::string config_echo;
};

inline std::string serialize_history(const PredictionHistory& history,
                                     std::string_view config_echo) {
  history.validate();
  std::string out;
  out.reserve(history.values.size() * 20 + 1024);
  out += kHistoryFormatTag;
  out += '\n';
  out += "dims " + std::to_string(history.n_samples) + ' ' +
         std::to_string(history.n_epochs) + ' ' + std::to_string(history.n_runs) + '\n';
  out += "ids";
  for (const auto& id : history.sample_ids) {
    out += ' ';
    out += encode_token(id);
  }
  out += '\n';
  out += "config ";
  out += config_echo;
  out += '\n';
  for (std::size_t r = 0; r < history.n_runs; ++r)
    for (std::size_t t = 0; t < history.n_epochs; ++t) {
      out += "rec " + std::to_string(r + 1) + ' ' + std::to_string(t + 1);
      for (std::size_t i = 0; i < history.n_samples; ++i) {
        out += ' ';
        out += fmt_double(history.value(r, t, i));
      }
      out += '\n';
    }
  return out;
}

inline void write_history(const std::filesystem::path& path,
                          const PredictionHistory& history,
                          std::string_view config_echo) {
  write_text_atomic(path, serialize_history(history, config_echo));
}

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

}  // namespace detail

inline HistoryFile read_history(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  const std::string origin = path.string();
  auto fail = [&](std::size_t line_no, const std::string& what) -> ParseError {
    return ParseError(origin + ": line " + std::to_string(line_no) + ": " + what);
  };

  HistoryFile result;
  PredictionHistory& h = result.history;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::size_t next_run = 1, next_epoch = 1;
  bool have_dims = false, have_ids = false, have_config = false;

  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = (nl == std::string_view::npos) ? std::string_view(text).substr(pos)
                                                           : std::string_view(text).substr(pos, nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    if (line_no == 1) {
      if (line != kHistoryFormatTag)
        throw fail(1, "unsupported format version '" + std::string(line) + "' (expected '" +
                          std::string(kHistoryFormatTag) + "')");
      continue;
    }

    if (line.rfind("dims ", 0) == 0) {
      const auto tok = detail::split_ws(line.substr(5));
      if (tok.size() != 3) throw fail(line_no, "dims needs 3 numbers");
      const auto n = parse_int(tok[0]), t = parse_int(tok[1]), r = parse_int(tok[2]);
      if (!n || !t || !r || *n < 1 || *t < 1 || *r < 1)
        throw fail(line_no, "dims must be positive integers");
      h.n_samples = static_cast<std::size_t>(*n);
      h.n_epochs = static_cast<std::size_t>(*t);
      h.n_runs = static_cast<std::size_t>(*r);
      h.values.assign(h.n_samples * h.n_epochs * h.n_runs, -1.0);
      have_dims = true;
    } else if (line.rfind("ids", 0) == 0 && (line.size() == 3 || line[3] == ' ')) {
      if (!have_dims) throw fail(line_no, "ids before dims");
      const auto tok = detail::split_ws(line.substr(3));
      if (tok.size() != h.n_samples)
        throw fail(line_no, "expected " + std::to_string(h.n_samples) + " ids, got " +
                                std::to_string(tok.size()));
      h.sample_ids.reserve(tok.size());
      for (const auto t : tok) h.sample_ids.push_back(decode_token(t));
      have_ids = true;
    } else if (line.rfind("config", 0) == 0 && (line.size() == 6 || line[6] == ' ')) {
      result.config_echo = std::string(line.size() > 7 ? line.substr(7) : "");
      have_config = true;
    } else if (line.rfind("rec ", 0) == 0) {
      if (!have_dims || !have_ids) throw fail(line_no, "rec before dims/ids");
      const auto tok = detail::split_ws(line.substr(4));
      if (tok.size() != h.n_samples + 2)
        throw fail(line_no, "expected run, epoch and " + std::to_string(h.n_samples) +
                                " probabilities, got " + std::to_string(tok.size()) +
                                " tokens");
      const auto run = parse_int(tok[0]), epoch = parse_int(tok[1]);
      if (!run || !epoch) throw fail(line_no, "bad run/epoch index");
      if (static_cast<std::size_t>(*run) != next_run ||
          static_cast<std::size_t>(*epoch) != next_epoch)
        throw fail(line_no, "out-of-order record (run " + std::to_string(*run) + ", epoch " +
                                std::to_string(*epoch) + "); expected (run " +
                                std::to_string(next_run) + ", epoch " +
                                std::to_string(next_epoch) + ")");
      const std::size_t r = next_run - 1, t = next_epoch - 1;
      for (std::size_t i = 0; i < h.n_samples; ++i) {
        const auto v = parse_double(tok[i + 2]);
        if (!v) throw fail(line_no, "non-numeric probability '" + std::string(tok[i + 2]) + "'");
        if (!(*v >= 0.0 && *v <= 1.0))
          throw fail(line_no, "probability " + std::string(tok[i + 2]) + " outside [0,1]");
        h.value(r, t, i) = *v;
      }
      if (++next_epoch > h.n_epochs) {
        next_epoch = 1;
        ++next_run;
      }
    } else {
      throw fail(line_no, "unrecognized record '" + std::string(line.substr(0, 16)) + "...'");
    }
  }

  if (line_no == 0) throw ParseError(origin + ": empty file");
  if (!have_dims) throw ParseError(origin + ": missing dims record");
  if (!have_ids) throw ParseError(origin + ": missing ids record");
  if (!have_config) throw ParseError(origin + ": missing config record");
  if (!(next_run == h.n_runs + 1 && next_epoch == 1))
    throw ParseError(origin + ": incomplete history (stopped before run " +
                     std::to_string(next_run) + ", epoch " + std::to_string(next_epoch) + ")");
  try {
    h.validate();
  } catch (const InvalidInputError& e) {
    throw ParseError(origin + ": invalid history: " + e.what());
  }
  return result;
}

}  // namespace lblab
