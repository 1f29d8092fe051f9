#pragma once

#include <stdexcept>

namespace statedup {

// Base type for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Document body is empty.
struct InputEmptyError : Error { using Error::Error; };

// Input bytes are not valid UTF-8 (after BOM sniffing / UTF-16 transcoding).
struct EncodingError : Error { using Error::Error; };

// Jaccard similarity of two empty sets is an undefined ratio.
struct BothEmptyError : Error { using Error::Error; };

// A parameter is outside its valid range.
struct InvalidParamError : Error { using Error::Error; };

// A sketch was requested for an empty shingle set.
struct EmptySetError : Error { using Error::Error; };

// Two sketches (or a sketch and an index) come from different hash families.
struct FamilyMismatchError : Error { using Error::Error; };

// A state id is already registered in the index.
struct DuplicateIdError : Error { using Error::Error; };

// A verdict has no ground-truth label.
struct MissingLabelError : Error { using Error::Error; };

// Filesystem / stream failure.
struct IoError : Error { using Error::Error; };

// Persisted or record data does not match the expected layout.
struct FormatError : Error { using Error::Error; };

}  // namespace statedup
