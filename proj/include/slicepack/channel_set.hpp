// Copyright 2026 The slicepack Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace slicepack {

// A set of channel indices drawn from [0, universe). Dense bitset storage;
// iteration is always in ascending index order.
class ChannelSet {
 public:
  ChannelSet() = default;
  explicit ChannelSet(int universe)
      : universe_(universe), words_((static_cast<std::size_t>(universe) + 63) / 64, 0) {}
  ChannelSet(int universe, std::initializer_list<int> members) : ChannelSet(universe) {
    for (int c : members) insert(c);
  }
  static ChannelSet from_indices(int universe, const std::vector<int>& members) {
    ChannelSet s(universe);
    for (int c : members) s.insert(c);
    return s;
  }
  static ChannelSet full(int universe) {
    ChannelSet s(universe);
    for (int c = 0; c < universe; ++c) s.insert(c);
    return s;
  }

  int universe() const { return universe_; }

  void insert(int c) { words_[word(c)] |= bit(c); }
  void erase(int c) { words_[word(c)] &= ~bit(c); }
  bool contains(int c) const {
    return c >= 0 && c < universe_ && (words_[word(c)] & bit(c)) != 0;
  }

  int size() const {
    int n = 0;
    for (auto w : words_) n += std::popcount(w);
    return n;
  }
  bool empty() const {
    for (auto w : words_)
      if (w != 0) return false;
    return true;
  }

  ChannelSet operator&(const ChannelSet& o) const {
    ChannelSet r(universe_);
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = words_[i] & o.words_[i];
    return r;
  }
  ChannelSet operator|(const ChannelSet& o) const {
    ChannelSet r(universe_);
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = words_[i] | o.words_[i];
    return r;
  }
  ChannelSet operator-(const ChannelSet& o) const {
    ChannelSet r(universe_);
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = words_[i] & ~o.words_[i];
    return r;
  }
  ChannelSet& operator|=(const ChannelSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  ChannelSet& operator-=(const ChannelSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }

  int intersection_size(const ChannelSet& o) const {
    int n = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) n += std::popcount(words_[i] & o.words_[i]);
    return n;
  }
  bool intersects(const ChannelSet& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & o.words_[i]) return true;
    return false;
  }
  bool is_subset_of(const ChannelSet& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }
  bool is_strict_subset_of(const ChannelSet& o) const { return is_subset_of(o) && *this != o; }

  std::vector<int> to_vector() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (std::size_t i = 0; i < words_.size(); ++i) {
      auto w = words_[i];
      while (w) {
        out.push_back(static_cast<int>(i * 64) + std::countr_zero(w));
        w &= w - 1;
      }
    }
    return out;
  }

  bool operator==(const ChannelSet& o) const = default;

 private:
  static std::size_t word(int c) { return static_cast<std::size_t>(c) / 64; }
  static std::uint64_t bit(int c) { return std::uint64_t{1} << (static_cast<unsigned>(c) % 64); }

  int universe_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace slicepack
