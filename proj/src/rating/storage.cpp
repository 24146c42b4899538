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

#include "rating/storage.hpp"

#include <sqlite3.h>

#include <algorithm>

namespace paiqa::rating {

StoredState MemoryStore::load() {
  std::lock_guard lock(mu_);
  return state_;
}

void MemoryStore::add_rater(const std::string& rater_id) {
  std::lock_guard lock(mu_);
  if (std::find(state_.raters.begin(), state_.raters.end(), rater_id) == state_.raters.end()) {
    state_.raters.push_back(rater_id);
  }
}

void MemoryStore::put_assignment(const Assignment& a) {
  std::lock_guard lock(mu_);
  std::erase_if(state_.assignments, [&](const Assignment& x) {
    return x.rater_id == a.rater_id && x.sample_id == a.sample_id;
  });
  state_.assignments.push_back(a);
}

void MemoryStore::drop_assignment(const std::string& rater_id, const std::string& sample_id) {
  std::lock_guard lock(mu_);
  std::erase_if(state_.assignments, [&](const Assignment& x) {
    return x.rater_id == rater_id && x.sample_id == sample_id;
  });
}

void MemoryStore::commit(const RatingRecord& record) {
  std::lock_guard lock(mu_);
  std::erase_if(state_.assignments, [&](const Assignment& x) {
    return x.rater_id == record.rater_id && x.sample_id == record.sample_id;
  });
  state_.records.push_back(record);
}

namespace {

class Stmt {
 public:
  Stmt(sqlite3* db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) {
      throw DataError(std::string("sqlite prepare: ") + sqlite3_errmsg(db));
    }
  }
  ~Stmt() { sqlite3_finalize(stmt_); }
  Stmt(const Stmt&) = delete;
  Stmt& operator=(const Stmt&) = delete;

  void bind(int i, const std::string& v) {
    sqlite3_bind_text(stmt_, i, v.c_str(), static_cast<int>(v.size()), SQLITE_TRANSIENT);
  }
  void bind(int i, std::int64_t v) { sqlite3_bind_int64(stmt_, i, v); }
  void bind(int i, const std::optional<int>& v) {
    if (v) {
      sqlite3_bind_int(stmt_, i, *v);
    } else {
      sqlite3_bind_null(stmt_, i);
    }
  }
  bool step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    throw DataError(std::string("sqlite step: ") + sqlite3_errmsg(db_));
  }
  std::string text(int col) const {
    const auto* p = sqlite3_column_text(stmt_, col);
    return p ? reinterpret_cast<const char*>(p) : "";
  }
  std::int64_t int64(int col) const { return sqlite3_column_int64(stmt_, col); }
  std::optional<int> opt_int(int col) const {
    if (sqlite3_column_type(stmt_, col) == SQLITE_NULL) return std::nullopt;
    return sqlite3_column_int(stmt_, col);
  }

 private:
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

}  // namespace

SqliteStore::SqliteStore(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  if (sqlite3_open(path.string().c_str(), &db_) != SQLITE_OK) {
    const std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    throw DataError("cannot open rating store " + path.string() + ": " + msg);
  }
  exec("PRAGMA journal_mode=WAL");
  exec("PRAGMA synchronous=NORMAL");
  exec(
      "CREATE TABLE IF NOT EXISTS raters (rater_id TEXT PRIMARY KEY);"
      "CREATE TABLE IF NOT EXISTS assignments ("
      "  rater_id TEXT NOT NULL, sample_id TEXT NOT NULL,"
      "  issued_at INTEGER NOT NULL, expires_at INTEGER NOT NULL,"
      "  PRIMARY KEY (rater_id, sample_id));"
      "CREATE TABLE IF NOT EXISTS ratings ("
      "  rater_id TEXT NOT NULL, sample_id TEXT NOT NULL,"
      "  overall INTEGER, harmony INTEGER, naturalness INTEGER, prompt_completion INTEGER,"
      "  excluded INTEGER NOT NULL, exclusion_reason TEXT, timestamp INTEGER NOT NULL,"
      "  PRIMARY KEY (rater_id, sample_id));");
}

SqliteStore::~SqliteStore() { sqlite3_close(db_); }

void SqliteStore::exec(const char* sql) {
  char* err = nullptr;
  if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown error";
    sqlite3_free(err);
    throw DataError("sqlite: " + msg);
  }
}

StoredState SqliteStore::load() {
  std::lock_guard lock(mu_);
  StoredState s;
  {
    Stmt q(db_, "SELECT rater_id FROM raters ORDER BY rater_id");
    while (q.step()) s.raters.push_back(q.text(0));
  }
  {
    Stmt q(db_,
           "SELECT rater_id, sample_id, issued_at, expires_at FROM assignments "
           "ORDER BY rater_id, sample_id");
    while (q.step()) s.assignments.push_back({q.text(0), q.text(1), q.int64(2), q.int64(3)});
  }
  {
    Stmt q(db_,
           "SELECT rater_id, sample_id, overall, harmony, naturalness, prompt_completion, "
           "excluded, exclusion_reason, timestamp FROM ratings ORDER BY sample_id, rater_id");
    while (q.step()) {
      RatingRecord r;
      r.rater_id = q.text(0);
      r.sample_id = q.text(1);
      r.overall = q.opt_int(2);
      r.harmony = q.opt_int(3);
      r.naturalness = q.opt_int(4);
      r.prompt_completion = q.opt_int(5);
      r.excluded = q.int64(6) != 0;
      if (r.excluded) r.exclusion_reason = parse_exclusion_reason(q.text(7));
      r.timestamp = q.int64(8);
      s.records.push_back(std::move(r));
    }
  }
  return s;
}

void SqliteStore::add_rater(const std::string& rater_id) {
  std::lock_guard lock(mu_);
  Stmt q(db_, "INSERT OR IGNORE INTO raters (rater_id) VALUES (?)");
  q.bind(1, rater_id);
  q.step();
}

void SqliteStore::put_assignment(const Assignment& a) {
  std::lock_guard lock(mu_);
  Stmt q(db_,
         "INSERT OR REPLACE INTO assignments (rater_id, sample_id, issued_at, expires_at) "
         "VALUES (?, ?, ?, ?)");
  q.bind(1, a.rater_id);
  q.bind(2, a.sample_id);
  q.bind(3, a.issued_at);
  q.bind(4, a.expires_at);
  q.step();
}

void SqliteStore::drop_assignment(const std::string& rater_id, const std::string& sample_id) {
  std::lock_guard lock(mu_);
  Stmt q(db_, "DELETE FROM assignments WHERE rater_id = ? AND sample_id = ?");
  q.bind(1, rater_id);
  q.bind(2, sample_id);
  q.step();
}

void SqliteStore::commit(const RatingRecord& r) {
  std::lock_guard lock(mu_);
  exec("BEGIN IMMEDIATE");
  try {
    {
      Stmt q(db_,
             "INSERT INTO ratings (rater_id, sample_id, overall, harmony, naturalness, "
             "prompt_completion, excluded, exclusion_reason, timestamp) "
             "VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)");
      q.bind(1, r.rater_id);
      q.bind(2, r.sample_id);
      q.bind(3, r.overall);
      q.bind(4, r.harmony);
      q.bind(5, r.naturalness);
      q.bind(6, r.prompt_completion);
      q.bind(7, static_cast<std::int64_t>(r.excluded ? 1 : 0));
      if (r.exclusion_reason) {
        q.bind(8, std::string(to_string(*r.exclusion_reason)));
      } else {
        q.bind(8, std::optional<int>{});
      }
      q.bind(9, r.timestamp);
      q.step();
    }
    {
      Stmt q(db_, "DELETE FROM assignments WHERE rater_id = ? AND sample_id = ?");
      q.bind(1, r.rater_id);
      q.bind(2, r.sample_id);
      q.step();
    }
    exec("COMMIT");
  } catch (...) {
    exec("ROLLBACK");
    throw;
  }
}

}  // namespace paiqa::rating
