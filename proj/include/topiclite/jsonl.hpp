#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "topiclite/corpus.hpp"
#include "topiclite/errors.hpp"

namespace topiclite {

// Reads a JSON-Lines corpus: one {"id", "lang", "text"} object per line.
inline std::vector<RawDocument> read_corpus_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file: " + path);

  std::vector<RawDocument> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": invalid JSON: " + e.what());
    }
    if (!obj.is_object() || !obj.contains("id") || !obj.contains("text")) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected object with \"id\" and \"text\"");
    }
    RawDocument doc;
    doc.id = obj.at("id").get<std::string>();
    doc.text = obj.at("text").get<std::string>();
    if (obj.contains("lang")) {
      auto lang = parse_language(obj.at("lang").get<std::string>());
      if (!lang) {
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": unknown language \"" +
                        obj.at("lang").get<std::string>() + "\"");
      }
      doc.language = *lang;
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

// Reads a directory of .txt files; filename stem becomes the document id.
inline std::vector<RawDocument> read_corpus_dir(const std::string& dir,
                                                Language language) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);

  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());

  std::vector<RawDocument> docs;
  for (const auto& p : paths) {
    std::ifstream in(p);
    if (!in) throw IoError("cannot open: " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    RawDocument doc;
    doc.id = p.stem().string();
    doc.language = language;
    doc.text = buf.str();
    docs.push_back(std::move(doc));
  }
  return docs;
}

// Dispatch: directory of .txt files or a JSONL file.
inline std::vector<RawDocument> read_corpus_input(const std::string& path,
                                                  Language dir_language) {
  if (std::filesystem::is_directory(path)) {
    return read_corpus_dir(path, dir_language);
  }
  return read_corpus_jsonl(path);
}

}  // namespace topiclite
