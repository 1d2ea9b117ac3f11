package com.acme.app.legacy;

import static com.acme.util.Strings.join;

public class Old {
    // kept for the 1.x migration path
    public void boot(String[] args) {
        com.acme.core.Engine.start(join(java.util.Arrays.asList(args), ","));
    }
}
