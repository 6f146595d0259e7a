#pragma once

#define MEDIANET_VERSION_MAJOR 0
#define MEDIANET_VERSION_MINOR 1
#define MEDIANET_VERSION_PATCH 0
#define MEDIANET_VERSION "0.1.0"
