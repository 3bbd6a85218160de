#pragma once

#include <optional>
#include <string>

#include "sdtl/nn.hpp"

namespace sdtl {

// Deserialized checkpoint contents. The head is optional: pretraining saves
// the encoder alone, fine-tuning saves both.
struct Checkpoint {
  EncoderParams encoder;
  std::optional<HeadParams> head;
};

// Writes a JSON checkpoint. Keys are emitted in sorted order and floats in
// shortest round-trip form, so saving the same parameters always produces
// identical bytes and load followed by save is a byte-level no-op.
// Throws IoError if the file cannot be written.
void save_checkpoint(const std::string& path, const EncoderParams& encoder,
                     const HeadParams* head = nullptr);

// Reads a checkpoint back, validating structure, version, shapes and value
// types. Throws IoError if the file cannot be read and FormatError (never a
// crash) on malformed, truncated or inconsistent contents.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace sdtl
