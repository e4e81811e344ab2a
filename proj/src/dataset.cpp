#include "staf/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "staf/errors.hpp"
#include "staf/tensor_io.hpp"

namespace staf {
namespace {

namespace fs = std::filesystem;

int pgm_token(std::istream& in) {
  // Skips whitespace and '#' comments before the next integer token.
  int ch = in.peek();
  while (ch == '#' || std::isspace(ch)) {
    if (ch == '#') {
      std::string dummy;
      std::getline(in, dummy);
    } else {
      in.get();
    }
    ch = in.peek();
  }
  int value = -1;
  in >> value;
  return in ? value : -1;
}

std::vector<Frame> load_staf_sequence(const fs::path& file) {
  TensorData t = read_tensor(file);
  int n = 0, h = 0, w = 0, c = 1;
  if (t.dims.size() == 3) {
    n = static_cast<int>(t.dims[0]);
    h = static_cast<int>(t.dims[1]);
    w = static_cast<int>(t.dims[2]);
  } else if (t.dims.size() == 4) {
    n = static_cast<int>(t.dims[0]);
    h = static_cast<int>(t.dims[1]);
    w = static_cast<int>(t.dims[2]);
    c = static_cast<int>(t.dims[3]);
  } else {
    throw FormatError("load_sequence: tensor in " + file.string() +
                      " must have 3 or 4 dims");
  }
  const std::size_t per = static_cast<std::size_t>(h) * w * c;
  std::vector<Frame> frames;
  frames.reserve(n);
  for (int i = 0; i < n; ++i) {
    std::vector<float> data(t.values.begin() + i * per,
                            t.values.begin() + (i + 1) * per);
    try {
      frames.emplace_back(h, w, c, std::move(data));
    } catch (const std::invalid_argument& e) {
      throw FormatError("load_sequence: " + file.string() + ": " + e.what());
    }
  }
  return frames;
}

}  // namespace

Frame read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("read_pgm: cannot open " + path.string());
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  if (magic != "P5") {
    throw FormatError("read_pgm: not a binary PGM: " + path.string());
  }
  const int width = pgm_token(in);
  const int height = pgm_token(in);
  const int maxval = pgm_token(in);
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) {
    throw FormatError("read_pgm: bad header in " + path.string());
  }
  in.get();  // single whitespace byte before the raster

  const std::size_t count = static_cast<std::size_t>(width) * height;
  const int bytes_per = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(count * bytes_per);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (!in) throw FormatError("read_pgm: truncated raster in " + path.string());

  std::vector<float> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    const int v = bytes_per == 1 ? raw[i] : (raw[2 * i] << 8) | raw[2 * i + 1];
    data[i] = static_cast<float>(v) / static_cast<float>(maxval);
  }
  return Frame(height, width, 1, std::move(data));
}

void write_pgm(const std::filesystem::path& path, const Frame& f) {
  if (f.channels() != 1) {
    throw std::invalid_argument("write_pgm: single-channel frames only");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("write_pgm: cannot open " + path.string());
  out << "P5\n" << f.width() << " " << f.height() << "\n255\n";
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) {
      out.put(static_cast<char>(
          static_cast<int>(std::lround(f.at(y, x) * 255.0f))));
    }
  }
}

std::pair<std::string, std::string> parse_subject_tag(const std::string& tag) {
  std::string stem = tag;
  std::string scenario;
  const auto underscore = tag.find('_');
  if (underscore != std::string::npos) {
    stem = tag.substr(0, underscore);
    scenario = tag.substr(underscore + 1);
  }
  const auto first_digit = stem.find_first_of("0123456789");
  std::string subject = stem;
  if (first_digit != std::string::npos) {
    auto end = stem.find_first_not_of("0123456789", first_digit);
    subject = stem.substr(first_digit, end == std::string::npos
                                           ? std::string::npos
                                           : end - first_digit);
  }
  return {subject, scenario};
}

LabeledSequence load_sequence(const std::filesystem::path& dir) {
  if (!fs::is_directory(dir)) {
    throw IngestionError("load_sequence: no such directory: " + dir.string());
  }

  std::vector<fs::path> pgms;
  std::vector<fs::path> tensors;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    if (ext == ".pgm") pgms.push_back(entry.path());
    if (ext == kTensorExtension) tensors.push_back(entry.path());
  }
  std::sort(pgms.begin(), pgms.end());
  std::sort(tensors.begin(), tensors.end());

  LabeledSequence seq;
  seq.label = dir.parent_path().filename().string();
  const auto [subject, scenario] = parse_subject_tag(dir.filename().string());
  seq.subject = subject;
  seq.scenario = scenario;

  if (pgms.empty() && tensors.size() == 1) {
    seq.frames = load_staf_sequence(tensors.front());
  } else {
    for (const auto& p : pgms) seq.frames.push_back(read_pgm(p));
  }
  if (seq.frames.empty()) {
    throw IngestionError("load_sequence: no frames in " + dir.string());
  }
  for (const Frame& f : seq.frames) {
    if (!f.same_shape(seq.frames.front())) {
      throw FormatError("load_sequence: mixed frame dimensions in " +
                        dir.string());
    }
  }
  return seq;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("read_manifest: cannot open " + path.string());
  std::vector<ManifestEntry> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    ManifestEntry e;
    std::string raw_path;
    if (!std::getline(ss, raw_path, '\t') || !std::getline(ss, e.label, '\t') ||
        !std::getline(ss, e.subject, '\t')) {
      throw FormatError("read_manifest: malformed line in " + path.string() +
                        ": " + line);
    }
    e.path = fs::path(raw_path);
    if (e.path.is_relative()) e.path = path.parent_path() / e.path;
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("write_manifest: cannot open " + path.string());
  for (const auto& e : entries) {
    out << e.path.string() << '\t' << e.label << '\t' << e.subject << '\n';
  }
}

std::vector<ManifestEntry> scan_dataset(const std::filesystem::path& root) {
  if (!fs::is_directory(root)) {
    throw IngestionError("scan_dataset: no such directory: " + root.string());
  }
  std::vector<ManifestEntry> entries;
  std::vector<fs::path> labels;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory()) labels.push_back(e.path());
  }
  std::sort(labels.begin(), labels.end());
  for (const auto& label_dir : labels) {
    std::vector<fs::path> seqs;
    for (const auto& e : fs::directory_iterator(label_dir)) {
      if (e.is_directory()) seqs.push_back(e.path());
    }
    std::sort(seqs.begin(), seqs.end());
    for (const auto& s : seqs) {
      ManifestEntry m;
      m.path = s;
      m.label = label_dir.filename().string();
      m.subject = parse_subject_tag(s.filename().string()).first;
      entries.push_back(std::move(m));
    }
  }
  return entries;
}

}  // namespace staf
