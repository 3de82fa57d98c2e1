#include "semantic/prompts.hpp"

#include "common/binary_io.hpp"

namespace agiqa::semantic {

char tag_char(Tag tag) noexcept { return static_cast<char>(tag); }

std::optional<Tag> tag_from_byte(std::uint8_t byte) noexcept {
  switch (byte) {
    case 0x61: return Tag::kSemantic;
    case 0x62: return Tag::kCoherence;
    case 0x71: return Tag::kQuality;
    default: return std::nullopt;
  }
}

const std::array<PromptTag, 2>& prompts() noexcept {
  static const std::array<PromptTag, 2> kPrompts{{
      {Tag::kSemantic,
       "Evaluate the input image to determine if its quality is compromised due to a lack of "
       "meaningful semantic content."},
      {Tag::kCoherence,
       "Evaluate if the image quality is compromised due to violations of coherence."},
  }};
  return kPrompts;
}

std::string prompt_registry_text() {
  std::string out;
  for (const auto& p : prompts()) {
    out += tag_char(p.tag);
    out += '\t';
    out += p.text;
    out += '\n';
  }
  return out;
}

void write_prompt_registry(const std::filesystem::path& path) {
  io::write_text_atomic(path, prompt_registry_text());
}

}  // namespace agiqa::semantic
