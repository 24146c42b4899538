// Copyright 2026 The PAIQA Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PAIQA_RATING_STORAGE_HPP_
#define PAIQA_RATING_STORAGE_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "core/model.hpp"

struct sqlite3;

namespace paiqa::rating {

struct Assignment {
  std::string rater_id;
  std::string sample_id;
  std::int64_t issued_at = 0;
  std::int64_t expires_at = 0;

  bool operator==(const Assignment&) const = default;
};

struct StoredState {
  std::vector<std::string> raters;
  std::vector<RatingRecord> records;
  std::vector<Assignment> assignments;
};

// Write-through persistence. Each call is one transaction.
class Storage {
 public:
  virtual ~Storage() = default;
  virtual StoredState load() = 0;
  virtual void add_rater(const std::string& rater_id) = 0;
  virtual void put_assignment(const Assignment& a) = 0;
  virtual void drop_assignment(const std::string& rater_id, const std::string& sample_id) = 0;
  // Inserts the record and closes the matching assignment.
  virtual void commit(const RatingRecord& record) = 0;
};

class MemoryStore : public Storage {
 public:
  StoredState load() override;
  void add_rater(const std::string& rater_id) override;
  void put_assignment(const Assignment& a) override;
  void drop_assignment(const std::string& rater_id, const std::string& sample_id) override;
  void commit(const RatingRecord& record) override;

 private:
  std::mutex mu_;
  StoredState state_;
};

class SqliteStore : public Storage {
 public:
  explicit SqliteStore(const std::filesystem::path& path);
  ~SqliteStore() override;
  SqliteStore(const SqliteStore&) = delete;
  SqliteStore& operator=(const SqliteStore&) = delete;

  StoredState load() override;
  void add_rater(const std::string& rater_id) override;
  void put_assignment(const Assignment& a) override;
  void drop_assignment(const std::string& rater_id, const std::string& sample_id) override;
  void commit(const RatingRecord& record) override;

 private:
  void exec(const char* sql);
  std::mutex mu_;
  sqlite3* db_ = nullptr;
};

}  // namespace paiqa::rating

#endif  // PAIQA_RATING_STORAGE_HPP_
