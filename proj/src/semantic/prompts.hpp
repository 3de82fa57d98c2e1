#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace agiqa::semantic {

/// Feature tag byte as stored in the cache container.
enum class Tag : std::uint8_t {
  kSemantic = 0x61,   // 'a': semantic-content prompt
  kCoherence = 0x62,  // 'b': coherence prompt
  kQuality = 0x71,    // 'q': quality-aware feature from the backbone
};

char tag_char(Tag tag) noexcept;
std::optional<Tag> tag_from_byte(std::uint8_t byte) noexcept;

struct PromptTag {
  Tag tag;
  std::string_view text;
};

/// The two fixed prompts, in tag order (a, b).
const std::array<PromptTag, 2>& prompts() noexcept;

/// One prompt per line, `<tag>\t<text>`, tag order.
std::string prompt_registry_text();
void write_prompt_registry(const std::filesystem::path& path);

}  // namespace agiqa::semantic
