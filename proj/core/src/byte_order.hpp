#pragma once

#include <bit>
#include <cstdint>
#include <cstring>

// Little-endian encode/decode for the on-disk payloads.
namespace blobtrack::detail {

template <typename T>
T byteswap_if_big(T value) {
  if constexpr (std::endian::native == std::endian::little) {
    return value;
  } else {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
      const unsigned char tmp = bytes[i];
      bytes[i] = bytes[sizeof(T) - 1 - i];
      bytes[sizeof(T) - 1 - i] = tmp;
    }
    std::memcpy(&value, bytes, sizeof(T));
    return value;
  }
}

template <typename T>
void store_le(unsigned char* dst, T value) {
  value = byteswap_if_big(value);
  std::memcpy(dst, &value, sizeof(T));
}

template <typename T>
T load_le(const unsigned char* src) {
  T value;
  std::memcpy(&value, src, sizeof(T));
  return byteswap_if_big(value);
}

}  // namespace blobtrack::detail
