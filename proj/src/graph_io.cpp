#include "gbd/graph_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "gbd/errors.hpp"

namespace gbd {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::kClean: return "clean";
    case Provenance::kCleanTrain: return "clean_train";
    case Provenance::kCleanTest: return "clean_test";
    case Provenance::kBackdooredTrain: return "backdoored_train";
    case Provenance::kBackdooredTest: return "backdoored_test";
  }
  return "unknown";
}

void validate(const LabeledDataset& dataset) {
  if (dataset.num_classes < 2) throw InvalidParameterError("num_classes must be at least 2");
  for (const auto& item : dataset.items) {
    if (item.label < 0 || item.label >= dataset.num_classes) {
      throw InvalidParameterError("label " + std::to_string(item.label) + " outside [0, " +
                                  std::to_string(dataset.num_classes) + ")");
    }
  }
}

double average_node_count(const LabeledDataset& dataset) {
  if (dataset.empty()) return 0.0;
  double total = 0.0;
  for (const auto& item : dataset.items) total += item.graph.node_count();
  return total / static_cast<double>(dataset.size());
}

LabeledDataset without_label(const LabeledDataset& dataset, int label) {
  LabeledDataset out{{}, dataset.num_classes, dataset.provenance};
  for (const auto& item : dataset.items) {
    if (item.label != label) out.items.push_back(item);
  }
  return out;
}

namespace {

class Tokenizer {
 public:
  explicit Tokenizer(std::istream& in) : in_(in) {}

  long long next_integer(const char* what) {
    std::string token = next(what);
    long long value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      throw FormatError("line " + std::to_string(line_) + ": expected integer " + what + ", got '" + token + "'");
    }
    return value;
  }

  std::string next(const char* what) {
    std::string token;
    if (!try_next(token)) throw FormatError(std::string("unexpected end of input reading ") + what);
    return token;
  }

  bool try_next(std::string& token) {
    while (true) {
      if (line_stream_ >> token) {
        if (token[0] == '#') {
          line_stream_.setstate(std::ios::eofbit);
          continue;
        }
        if (auto hash = token.find('#'); hash != std::string::npos) {
          token.resize(hash);
          line_stream_.setstate(std::ios::eofbit);
        }
        return true;
      }
      std::string line;
      if (!std::getline(in_, line)) return false;
      ++line_;
      line_stream_.clear();
      line_stream_.str(line);
    }
  }

  int line() const { return line_; }

 private:
  std::istream& in_;
  std::istringstream line_stream_;
  int line_ = 0;
};

}  // namespace

LabeledDataset read_dataset(std::istream& in) {
  Tokenizer tokens(in);
  if (tokens.next("header") != "G") throw FormatError("dataset must start with 'G <count>'");
  const long long count = tokens.next_integer("graph count");
  if (count < 0) throw FormatError("negative graph count");

  LabeledDataset dataset;
  int max_label = 0;
  for (long long k = 0; k < count; ++k) {
    if (tokens.next("graph header") != "g") {
      throw FormatError("line " + std::to_string(tokens.line()) + ": expected 'g <n> <e> <label>'");
    }
    const long long n = tokens.next_integer("node count");
    const long long e = tokens.next_integer("edge count");
    const long long label = tokens.next_integer("label");
    if (n <= 0 || e < 0 || label < 0 || static_cast<unsigned long long>(e) > pair_count(static_cast<int>(n))) {
      throw FormatError("line " + std::to_string(tokens.line()) + ": invalid graph header");
    }
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(e));
    for (long long i = 0; i < e; ++i) {
      const long long u = tokens.next_integer("edge endpoint");
      const long long v = tokens.next_integer("edge endpoint");
      if (!(0 <= u && u < v && v < n)) {
        throw FormatError("line " + std::to_string(tokens.line()) + ": edge must satisfy 0 <= u < v < n");
      }
      edges.push_back({static_cast<int>(u), static_cast<int>(v)});
    }
    Graph g(static_cast<int>(n), std::move(edges));
    if (g.edge_count() != static_cast<std::size_t>(e)) {
      throw FormatError("line " + std::to_string(tokens.line()) + ": duplicate edge");
    }
    max_label = std::max(max_label, static_cast<int>(label));
    dataset.items.push_back({std::move(g), static_cast<int>(label), static_cast<int>(label), {}, false});
  }
  std::string trailing;
  if (tokens.try_next(trailing)) throw FormatError("trailing content after last graph: '" + trailing + "'");
  dataset.num_classes = std::max(2, max_label + 1);
  return dataset;
}

LabeledDataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_dataset(in);
}

void write_dataset(std::ostream& out, const LabeledDataset& dataset) {
  out << "G " << dataset.size() << '\n';
  for (const auto& item : dataset.items) {
    out << "g " << item.graph.node_count() << ' ' << item.graph.edge_count() << ' ' << item.label << '\n';
    for (const Edge& e : item.graph.edges()) out << e.u << ' ' << e.v << '\n';
  }
}

void write_dataset(const std::filesystem::path& path, const LabeledDataset& dataset) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_dataset(out, dataset);
}

}  // namespace gbd
