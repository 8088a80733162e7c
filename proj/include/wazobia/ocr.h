#ifndef WAZOBIA_OCR_H_
#define WAZOBIA_OCR_H_

// Text extraction through an external OCR program.
//
// The command template is split on whitespace into argv; every argument has
// "{input}" replaced by the image path and "{lang}" by the OCR language
// code. No shell is involved, so the template cannot quote arguments that
// contain spaces.

#include <filesystem>
#include <string>
#include <vector>

#include "wazobia/text.h"

namespace wazobia {

// hau, ibo, yor; eng for kUnknown.
std::string_view ocr_language_code(Language language);

class OcrAdapter {
 public:
  OcrAdapter() = default;
  explicit OcrAdapter(std::string command_template)
      : template_(std::move(command_template)) {}

  bool configured() const;
  const std::string& command_template() const { return template_; }

  std::vector<std::string> command_for(const std::filesystem::path& image,
                                       Language language) const;

  // Standard output with trailing whitespace removed. Throws FILE_NOT_FOUND,
  // OCR_UNAVAILABLE (no template, program missing) or OCR_FAILED (nonzero
  // exit; message carries stderr).
  std::string extract(const std::filesystem::path& image, Language language) const;

 private:
  std::string template_;
};

// The "ocr_command" key of <data_dir>/config.json, or "" when absent.
std::string read_ocr_command(const std::filesystem::path& data_dir);

}  // namespace wazobia

#endif  // WAZOBIA_OCR_H_
