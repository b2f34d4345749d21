/*
 * Copyright 2026 The cwishart Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <iostream>

#include "cli.hpp"
#include "cwishart/error.hpp"

int main(int argc, char** argv)
{
    const auto parsed = cwishart::cli::parse_config(argc, argv);
    if (!parsed.config) {
        if (parsed.exit_code == 0) {
            std::cout << parsed.message;
        } else {
            std::cerr << "cwishart: usage error: " << parsed.message << '\n';
        }
        return parsed.exit_code;
    }
    try {
        cwishart::cli::run(*parsed.config);
    } catch (const cwishart::Error& e) {
        std::cerr << "cwishart: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "cwishart: internal error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
