#pragma once

#include <map>
#include <string>
#include <string_view>

namespace graphpipe {

/// Prompt templates with {NAME} placeholders. Built-in defaults can be
/// overridden per template by files named <template>.txt in a directory.
class PromptLibrary {
 public:
  static PromptLibrary defaults();
  static PromptLibrary from_directory(const std::string& dir);

  const std::string& get(std::string_view name) const;
  void set(std::string_view name, std::string text);

  static std::string substitute(
      std::string text,
      const std::map<std::string, std::string>& placeholders);

 private:
  std::map<std::string, std::string, std::less<>> templates_;
};

}  // namespace graphpipe
